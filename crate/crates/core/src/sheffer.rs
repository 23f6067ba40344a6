//! Sheffer-type polynomial sequences and their ladder operators.
//!
//! A sequence `s_n` is described either by its generating function
//! `A(λ)·e^{x·B(λ)}` or by the pair `(f, g)` with `B = f⁻¹` and
//! `A = 1/g(f⁻¹)`. The lowering operator is `P = f(D)` and the raising
//! operator is `M = [X - g'(D)/g(D)]·1/f'(D)`, so that
//! `M s_n = s_{n+1}` and `P s_n = n·s_{n-1}`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::fps::{elementary, FpsError, Series};
use crate::poly::Poly;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShefferError {
    #[error("unknown polynomial family {0:?}")]
    UnknownFamily(String),
    #[error("invalid Sheffer pair: {0}")]
    InvalidPair(&'static str),
    #[error("series order {have} is too low, need at least {need}")]
    OrderTooLow { have: usize, need: usize },
    #[error(transparent)]
    Fps(#[from] FpsError),
}

/// The data `(f, g)` together with the derived `(A, B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShefferPair {
    f: Series,
    g: Series,
    a: Series,
    b: Series,
}

impl ShefferPair {
    pub fn from_fg(f: Series, g: Series) -> Result<Self, ShefferError> {
        if f.order() < 1 || !f.constant_term().is_zero() || f.coeff(1).is_zero() {
            return Err(ShefferError::InvalidPair("f needs f(0) = 0 and f'(0) != 0"));
        }
        if g.constant_term().is_zero() {
            return Err(ShefferError::InvalidPair("g needs g(0) != 0"));
        }
        let b = f.revert()?;
        let a = g.compose(&b)?.recip()?;
        Ok(ShefferPair { f, g, a, b })
    }

    pub fn from_ab(a: Series, b: Series) -> Result<Self, ShefferError> {
        if b.order() < 1 || !b.constant_term().is_zero() || b.coeff(1).is_zero() {
            return Err(ShefferError::InvalidPair("B needs B(0) = 0 and B'(0) != 0"));
        }
        if a.constant_term().is_zero() {
            return Err(ShefferError::InvalidPair("A needs A(0) != 0"));
        }
        let f = b.revert()?;
        let g = a.compose(&f)?.recip()?;
        Ok(ShefferPair { f, g, a, b })
    }

    pub fn f(&self) -> &Series {
        &self.f
    }

    pub fn g(&self) -> &Series {
        &self.g
    }

    pub fn a(&self) -> &Series {
        &self.a
    }

    pub fn b(&self) -> &Series {
        &self.b
    }

    pub fn order(&self) -> usize {
        [&self.f, &self.g, &self.a, &self.b].iter().map(|s| s.order()).min().unwrap_or(0)
    }

    /// `s_0 ..= s_{n_max}` from `s_n(x) = n!·[λ^n] A(λ)e^{xB(λ)}`.
    pub fn sequence(&self, n_max: usize) -> Result<Vec<Poly>, ShefferError> {
        sequence_from_pair(self, n_max)
    }
}

pub fn sequence_from_pair(pair: &ShefferPair, n_max: usize) -> Result<Vec<Poly>, ShefferError> {
    sequence_from_ab(&pair.a, &pair.b, n_max)
}

/// Same as [`sequence_from_pair`] but straight from `A`, `B`.
pub fn sequence_from_ab(a: &Series, b: &Series, n_max: usize) -> Result<Vec<Poly>, ShefferError> {
    let have = a.order().min(b.order());
    if have < n_max {
        return Err(ShefferError::OrderTooLow { have, need: n_max });
    }
    let a = a.truncate(n_max);
    let b = b.truncate(n_max);
    // table[n][k] = n!/k! · [λ^n](A·B^k)
    let mut rows = vec![vec![Rational::zero(); n_max + 1]; n_max + 1];
    let mut ab_k = a.clone();
    for k in 0..=n_max {
        let k_fact = Rational::from_integer(rational::factorial(k));
        for (n, row) in rows.iter_mut().enumerate() {
            if !ab_k.coeff(n).is_zero() {
                row[k] = ab_k.coeff(n) * Rational::from_integer(rational::factorial(n)) / &k_fact;
            }
        }
        ab_k = ab_k.mul(&b);
    }
    Ok(rows.into_iter().map(Poly::new).collect())
}

/// `M = X·m₁(D) + m₀(D)`; a lowering operator has `m₁ = 0`.
///
/// `D` acts first, then multiplication by `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderOp {
    pub x_part: Series,
    pub d_part: Series,
}

impl LadderOp {
    pub fn order(&self) -> usize {
        self.x_part.order().min(self.d_part.order())
    }

    pub fn apply(&self, p: &Poly) -> Result<Poly, ShefferError> {
        apply_ladder(self, p)
    }
}

/// `Σ_k c_k D^k p`; needs `c_k` up to the degree of `p`.
fn apply_d_series(s: &Series, p: &Poly) -> Poly {
    let mut acc = Poly::zero();
    let mut dp = p.clone();
    let mut k = 0;
    while !dp.is_zero() {
        let c = s.coeff(k);
        if !c.is_zero() {
            acc = acc.add(&dp.scale(c));
        }
        dp = dp.deriv();
        k += 1;
    }
    acc
}

pub fn apply_ladder(op: &LadderOp, p: &Poly) -> Result<Poly, ShefferError> {
    let need = p.degree().map_or(0, |d| d + 1);
    if op.order() < need {
        return Err(ShefferError::OrderTooLow { have: op.order(), need });
    }
    let x_part = apply_d_series(&op.x_part, p).mul_x();
    Ok(x_part.add(&apply_d_series(&op.d_part, p)))
}

/// `(M, P)` with `P = f(D)` and `M = [X - g'(D)/g(D)]·1/f'(D)`.
pub fn ladder_ops(pair: &ShefferPair) -> Result<(LadderOp, LadderOp), ShefferError> {
    let inv_fp = pair.f.deriv().recip()?;
    let log_dg = pair.g.deriv().div(&pair.g)?;
    let raising = LadderOp { x_part: inv_fp.clone(), d_part: log_dg.mul(&inv_fp).neg() };
    let lowering = LadderOp { x_part: Series::zero(pair.f.order()), d_part: pair.f.clone() };
    Ok((raising, lowering))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `M s_n = s_{n+1}`
    Raising,
    /// `P s_n = n s_{n-1}`
    Lowering,
    /// `M P s_n = n s_n`
    Eigen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialityFailure {
    pub identity: Identity,
    pub n: usize,
    pub expected: Poly,
    pub got: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialityReport {
    pub n_max: usize,
    pub checks: usize,
    pub failures: Vec<MonomialityFailure>,
}

impl MonomialityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&MonomialityFailure> {
        self.failures.first()
    }
}

/// Checks the three ladder identities exactly for every `n <= n_max`. The
/// pair must be known to order `n_max + 2`.
pub fn monomiality_check(pair: &ShefferPair, n_max: usize) -> Result<MonomialityReport, ShefferError> {
    let need = n_max + 2;
    if pair.order() < need {
        return Err(ShefferError::OrderTooLow { have: pair.order(), need });
    }
    let seq = sequence_from_pair(pair, n_max + 1)?;
    let (m, p) = ladder_ops(pair)?;
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut record = |identity, n, expected: Poly, got: Poly| {
        checks += 1;
        if expected != got {
            failures.push(MonomialityFailure { identity, n, expected, got });
        }
    };
    for n in 0..=n_max {
        let n_q = rational::int(n as i64);
        let raised = apply_ladder(&m, &seq[n])?;
        record(Identity::Raising, n, seq[n + 1].clone(), raised);
        let lowered = apply_ladder(&p, &seq[n])?;
        let want = if n == 0 { Poly::zero() } else { seq[n - 1].scale(&n_q) };
        record(Identity::Lowering, n, want, lowered.clone());
        let mp = apply_ladder(&m, &lowered)?;
        record(Identity::Eigen, n, seq[n].scale(&n_q), mp);
    }
    Ok(MonomialityReport { n_max, checks, failures })
}

/// The named families with known ladder representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Hermite,
    Laguerre,
    Bessel,
    Bell,
    LowerFactorial,
    Hahn,
    Idempotent,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Hermite,
        Family::Laguerre,
        Family::Bessel,
        Family::Bell,
        Family::LowerFactorial,
        Family::Hahn,
        Family::Idempotent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hermite => "hermite",
            Family::Laguerre => "laguerre",
            Family::Bessel => "bessel",
            Family::Bell => "bell",
            Family::LowerFactorial => "lower_factorial",
            Family::Hahn => "hahn",
            Family::Idempotent => "idempotent",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ShefferError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ShefferError::UnknownFamily(s.to_string()))
    }
}

/// `(f, g)` for a named family, known to `order`.
///
/// | family | `P = f(D)` | `g(D)` | generating function |
/// |---|---|---|---|
/// | hermite | `D/2` | `e^{D²/4}` | `e^{2λx-λ²}` |
/// | laguerre (`n!L_n`) | `D/(D-1)` | `1/(1-D)` | `e^{xλ/(λ-1)}/(1-λ)` |
/// | bessel | `D - D²/2` | `1` | `e^{x(1-√(1-2λ))}` |
/// | bell | `ln(1+D)` | `1` | `e^{x(e^λ-1)}` |
/// | lower_factorial | `e^D - 1` | `1` | `e^{x ln(1+λ)}` |
/// | hahn | `tan D` | `sec D` | `e^{x arctan λ}/√(1+λ²)` |
/// | idempotent | `W(D)` | `1` | `e^{xλe^λ}` |
pub fn catalog(family: Family, order: usize) -> ShefferPair {
    let one = Series::one(order);
    let x = Series::x(order);
    let (f, g) = match family {
        Family::Hermite => {
            let quarter_sq = Series::monomial(rational::ratio(1, 4), 2, order);
            (x.scale(&rational::ratio(1, 2)), quarter_sq.exp().expect("no constant term"))
        }
        Family::Laguerre => {
            let geo = elementary::geometric(order);
            (x.mul(&geo).neg(), geo)
        }
        Family::Bessel => (Series::new(vec![Rational::zero(), Rational::one(), rational::ratio(-1, 2)], order), one),
        Family::Bell => (elementary::log1p(order), one),
        Family::LowerFactorial => (elementary::exp_x(order).sub(&one), one),
        Family::Hahn => (elementary::tan(order), elementary::cos(order).recip().expect("cos(0) = 1")),
        Family::Idempotent => (elementary::lambert_w(order), one),
    };
    ShefferPair::from_fg(f, g).expect("catalog pairs are valid")
}
