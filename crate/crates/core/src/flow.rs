//! Normal ordering of `e^{λX}` for `X = q(a†)a + v(a†)` and its conjugate.
//!
//! The normally ordered exponential is parameterized by two functions
//!
//! ```text
//! ∂T/∂λ = q(T),      T(0, x) = x
//! ∂G/∂λ = v(T)·G,    G(0, x) = 1
//! ```
//!
//! with `e^{λX} = :G(λ,a†)·e^{[T(λ,a†) - a†]a}:` on the creation-linear side
//! and `e^{λ(a†q(a)+v(a))} = :e^{a†[T(λ,a) - a]}·G(λ,a):` on the other.
//! Both are solved here as exact [`BiSeries`], one λ-coefficient at a time.
//!
//! The same `T`, `G` evaluated at a fixed point `x = z'^*` give a Sheffer
//! pair `A(λ) = G(λ, z'^*)`, `B(λ) = T(λ, z'^*) - z'^*`;
//! [`sheffer_from_qv`] and [`qv_from_sheffer`] go back and forth.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boson::{NormalForm, Side};
use crate::fps::{FpsError, Series};
use crate::rational::{self, Rational};
use crate::sheffer::{sequence_from_pair, ShefferError, ShefferPair};

/// Tail bound accepted by the numeric evaluators.
pub const EVAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("series order {have} is too low, need at least {need}")]
    OrderTooLow { have: usize, need: usize },
    #[error("normal-form expansion needs series about x = 0, got center {0}")]
    NonZeroCenter(Rational),
    #[error("series tail estimate {tail:e} exceeds tolerance {tolerance:e}")]
    SeriesTailTooLarge { tail: f64, tolerance: f64 },
    #[error(transparent)]
    Fps(#[from] FpsError),
    #[error(transparent)]
    Sheffer(#[from] ShefferError),
}

/// `Σ_n c_n(x) λ^n` where each `c_n` is a [`Series`] in `x - center`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiSeries {
    #[serde(with = "rational::serde_pq")]
    center: Rational,
    coeffs: Vec<Series>,
}

/// `q`, `v` expanded about an explicit center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QvSymbol {
    pub q: Series,
    pub v: Series,
    #[serde(with = "rational::serde_pq")]
    pub center: Rational,
}

impl QvSymbol {
    pub fn new(q: Series, v: Series, center: Rational) -> Self {
        QvSymbol { q, v, center }
    }

    /// Expanded about zero.
    pub fn at_origin(q: Series, v: Series) -> Self {
        QvSymbol { q, v, center: Rational::zero() }
    }

    pub fn order(&self) -> usize {
        self.q.order().min(self.v.order())
    }

    /// Re-expands both functions about `center`. Exact for polynomials.
    pub fn recenter(&self, center: &Rational) -> QvSymbol {
        if center == &self.center {
            return self.clone();
        }
        let d = center - &self.center;
        QvSymbol { q: self.q.shift(&d), v: self.v.shift(&d), center: center.clone() }
    }

    /// The operator as a normal form; `q`, `v` must be about zero.
    pub fn operator(&self, side: Side) -> Result<NormalForm, FlowError> {
        if !self.center.is_zero() {
            return Err(FlowError::NonZeroCenter(self.center.clone()));
        }
        Ok(NormalForm::from_linear(&self.q, &self.v, side))
    }
}

impl BiSeries {
    pub fn new(center: Rational, coeffs: Vec<Series>) -> Self {
        assert!(!coeffs.is_empty(), "a BiSeries needs the λ^0 coefficient");
        BiSeries { center, coeffs }
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn lambda_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Series] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Series {
        &self.coeffs[n]
    }

    /// Smallest x-order over all λ-coefficients.
    pub fn x_order(&self) -> usize {
        self.coeffs.iter().map(Series::order).min().unwrap_or(0)
    }

    pub fn truncate(&self, lambda_order: usize) -> BiSeries {
        BiSeries { center: self.center.clone(), coeffs: self.coeffs[..=lambda_order].to_vec() }
    }

    pub fn mul(&self, other: &BiSeries) -> BiSeries {
        let n = self.lambda_order().min(other.lambda_order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = self.coeffs[0].mul(&other.coeffs[k]);
                for i in 1..=k {
                    acc = acc.add(&self.coeffs[i].mul(&other.coeffs[k - i]));
                }
                acc
            })
            .collect();
        BiSeries { center: self.center.clone(), coeffs }
    }

    /// The λ-series at `x = center`.
    pub fn at_center(&self) -> Series {
        let c = self.coeffs.iter().map(|s| s.constant_term().clone()).collect();
        Series::new(c, self.lambda_order())
    }

    /// Numeric value at `(λ, x)` with a tail estimate covering both the
    /// dropped λ-terms and the dropped x-terms.
    pub fn eval(&self, lambda: Complex64, x: Complex64) -> (Complex64, f64) {
        let y = x - rational::to_f64(&self.center);
        let n = self.lambda_order();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut tail = 0.0;
        let mut lp = Complex64::new(1.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let (val, x_tail) = c.eval_complex(y);
            let term = lp * val;
            tail += lp.norm() * x_tail;
            if k + 1 >= n && k > 0 {
                tail += term.norm();
            }
            sum += term;
            lp *= lambda;
        }
        (sum, tail)
    }
}

impl BiSeries {
    /// `x` when the center is zero, `(x - c)` otherwise.
    pub fn variable(&self) -> String {
        if self.center.is_zero() {
            "x".into()
        } else if self.center.is_negative() {
            format!("(x + {})", -&self.center)
        } else {
            format!("(x - {})", self.center)
        }
    }
}

/// Nonzero λ-coefficients with their exact x-terms, then `O(λ^{N+1})`.
/// The x-truncation order is reported by [`BiSeries::x_order`].
impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.variable();
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let terms = c.display_terms(&var);
            let single = c.coeffs().iter().filter(|k| !k.is_zero()).count() == 1;
            let coef = if single && !terms.starts_with('-') { terms } else { format!("({terms})") };
            match (n, coef.as_str()) {
                (0, _) => f.write_str(&coef)?,
                (1, "1") => f.write_str("λ")?,
                (1, _) => write!(f, "{coef}*λ")?,
                (_, "1") => write!(f, "λ^{n}")?,
                _ => write!(f, "{coef}*λ^{n}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(λ^{})", self.lambda_order() + 1)
    }
}

/// `[λ^j] δ^m` tables for a series `δ = Σ_{k≥1} δ_k λ^k`, grown one
/// λ-coefficient at a time. `None` stands for an exact zero.
struct DeltaPowers {
    delta: Vec<Option<Series>>,
    // pows[m][j] = [λ^j] δ^m
    pows: Vec<Vec<Option<Series>>>,
    unit_order: usize,
}

impl DeltaPowers {
    /// `unit_order` is the x-order used for the exact series `δ^0 = 1`.
    fn new(unit_order: usize) -> Self {
        DeltaPowers { delta: vec![None], pows: vec![vec![]], unit_order }
    }

    /// Appends `δ_n` (the caller passes `None` for `n = 0`) and fills the
    /// `λ^n` column of every power.
    fn push(&mut self, delta_n: Option<Series>) {
        let n = self.pows[0].len();
        if n > 0 {
            self.delta.push(delta_n);
        }
        // δ^0 = 1
        self.pows[0].push(if n == 0 { Some(Series::one(self.unit_order)) } else { None });
        if self.pows.len() <= n {
            self.pows.push(vec![None; n]);
        }
        for m in 1..=n {
            let mut acc: Option<Series> = None;
            for k in 1..=(n + 1 - m) {
                let (Some(dk), Some(prev)) = (&self.delta[k], &self.pows[m - 1][n - k]) else {
                    continue;
                };
                let term = dk.mul(prev);
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
            self.pows[m].push(acc);
        }
    }

    /// `[λ^n] Σ_m taylor[m]·δ^m`.
    fn compose_column(&self, taylor: &[Series], n: usize) -> Series {
        let mut acc: Option<Series> = None;
        for (m, tm) in taylor.iter().enumerate().take(n + 1) {
            if let Some(p) = &self.pows[m][n] {
                let term = tm.mul(p);
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
        }
        acc.unwrap_or_else(|| Series::zero(taylor[0].order()))
    }
}

/// `f^{(m)}/m!` for `m = 0..=count`.
fn taylor_derivatives(f: &Series, count: usize) -> Vec<Series> {
    let mut out = Vec::with_capacity(count + 1);
    let mut d = f.clone();
    out.push(d.clone());
    for m in 1..=count {
        d = d.deriv().scale(&rational::ratio(1, m as i64));
        out.push(d.clone());
    }
    out
}

/// `f(T(λ, x))` as a BiSeries, for `f` expanded about the same center as
/// `T`. The λ-order is capped by `f`'s order, since the λ^m coefficient
/// needs `f^{(m)}`.
pub fn substitute(f: &Series, t: &BiSeries) -> BiSeries {
    let order = t.lambda_order().min(f.order());
    let taylor = taylor_derivatives(f, order);
    let mut pows = DeltaPowers::new(f.order());
    let mut coeffs = Vec::with_capacity(order + 1);
    for n in 0..=order {
        pows.push(if n == 0 { None } else { Some(t.coeffs[n].clone()) });
        coeffs.push(pows.compose_column(&taylor, n));
    }
    BiSeries { center: t.center.clone(), coeffs }
}

fn identity_series(center: &Rational, order: usize) -> Series {
    Series::new(vec![center.clone(), Rational::one()], order)
}

/// Solves `∂T/∂λ = q(T)`, `T(0,x) = x` through `λ^order`, using
/// `c_{n+1} = [λ^n] q(T) / (n+1)`.
pub fn solve_t(q: &Series, center: &Rational, order: usize) -> Result<BiSeries, FlowError> {
    if q.order() < order {
        return Err(FlowError::OrderTooLow { have: q.order(), need: order });
    }
    let taylor = taylor_derivatives(q, order.saturating_sub(1));
    let mut coeffs = vec![identity_series(center, q.order())];
    let mut pows = DeltaPowers::new(q.order());
    for n in 0..order {
        pows.push(if n == 0 { None } else { Some(coeffs[n].clone()) });
        let w = pows.compose_column(&taylor, n);
        coeffs.push(w.scale(&rational::ratio(1, n as i64 + 1)));
    }
    Ok(BiSeries { center: center.clone(), coeffs })
}

/// Solves `∂G/∂λ = v(T)·G`, `G(0,x) = 1` through `λ^order`.
pub fn solve_g(v: &Series, t: &BiSeries, order: usize) -> Result<BiSeries, FlowError> {
    if v.order() < order {
        return Err(FlowError::OrderTooLow { have: v.order(), need: order });
    }
    if t.lambda_order() < order {
        return Err(FlowError::OrderTooLow { have: t.lambda_order(), need: order });
    }
    let taylor = taylor_derivatives(v, order.saturating_sub(1));
    let mut pows = DeltaPowers::new(v.order());
    let mut w: Vec<Series> = Vec::with_capacity(order);
    let mut g = vec![Series::one(v.order())];
    for n in 0..order {
        pows.push(if n == 0 { None } else { Some(t.coeffs[n].clone()) });
        w.push(pows.compose_column(&taylor, n));
        let mut acc = w[0].mul(&g[n]);
        for k in 1..=n {
            acc = acc.add(&w[k].mul(&g[n - k]));
        }
        g.push(acc.scale(&rational::ratio(1, n as i64 + 1)));
    }
    Ok(BiSeries { center: t.center.clone(), coeffs: g })
}

/// `h(λ + u(y))` as a BiSeries in `λ`, i.e. `λ^j ↦ (h^{(j)} ∘ u)/j!`.
/// `u` must have zero constant term.
pub fn compose_shifted(h: &Series, u: &Series, order: usize) -> Result<Vec<Series>, FlowError> {
    if h.order() < order {
        return Err(FlowError::OrderTooLow { have: h.order(), need: order });
    }
    taylor_derivatives(h, order)
        .iter()
        .map(|d| d.compose(u).map_err(FlowError::from))
        .collect()
}

/// `T(λ,x) = f⁻¹(λ + f(x))` for `f` given in `y = x - center` with
/// `f(0) = 0`, `f'(0) != 0`. Agrees with [`solve_t`] for `q = 1/f'`.
pub fn closed_t_from_f(f: &Series, center: &Rational, order: usize) -> Result<BiSeries, FlowError> {
    let h = f.revert()?;
    let mut coeffs = compose_shifted(&h, f, order)?;
    coeffs[0] = coeffs[0].add(&Series::constant(center.clone(), coeffs[0].order()));
    Ok(BiSeries { center: center.clone(), coeffs })
}

/// `T` and `G` together with the side they were solved for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalExponential {
    #[serde(rename = "T")]
    pub t: BiSeries,
    #[serde(rename = "G")]
    pub g: BiSeries,
    pub side: Side,
    /// λ-coefficients of `e^{λX}` as normal forms; empty unless the
    /// series are about zero.
    pub expansion: Vec<NormalForm>,
}

impl NormalExponential {
    /// Exact normal forms for `λ^0 ..= λ^N`. Terms with creation degree
    /// (annihilation degree on the conjugate side) above
    /// [`reliable_degree`](Self::reliable_degree) are not included.
    pub fn expand(&self) -> Result<Vec<NormalForm>, FlowError> {
        expand_normal_exponential(&self.t, &self.g, self.side)
    }

    /// Highest polynomial degree of the expansion that is exact.
    pub fn reliable_degree(&self) -> usize {
        self.t.x_order().min(self.g.x_order())
    }
}

fn expand_normal_exponential(t: &BiSeries, g: &BiSeries, side: Side) -> Result<Vec<NormalForm>, FlowError> {
    if !t.center.is_zero() {
        return Err(FlowError::NonZeroCenter(t.center.clone()));
    }
    let order = t.lambda_order().min(g.lambda_order());
    let mut delta = t.truncate(order);
    let x_ord = delta.coeffs[0].order();
    delta.coeffs[0] = Series::zero(x_ord);
    let mut out = vec![NormalForm::zero(); order + 1];
    // e_k = G·δ^k / k!, contributing y^k.
    let mut e = g.truncate(order);
    for k in 0..=order {
        if k > 0 {
            e = e.mul(&delta);
            let inv_k = rational::ratio(1, k as i64);
            for c in &mut e.coeffs {
                *c = c.scale(&inv_k);
            }
        }
        for (n, slot) in out.iter_mut().enumerate() {
            for (i, c) in e.coeffs[n].coeffs().iter().enumerate() {
                slot.add_term(i as u32, k as u32, c.clone());
            }
        }
    }
    Ok(match side {
        Side::CreationLinear => out,
        Side::AnnihilationLinear => out.iter().map(NormalForm::conjugate).collect(),
    })
}

/// Solves the flow for `sym` and packages the normally ordered exponential.
pub fn normal_exponential(sym: &QvSymbol, side: Side, order: usize) -> Result<NormalExponential, FlowError> {
    let t = solve_t(&sym.q, &sym.center, order)?;
    let g = solve_g(&sym.v, &t, order)?;
    let expansion = if sym.center.is_zero() { expand_normal_exponential(&t, &g, side)? } else { Vec::new() };
    Ok(NormalExponential { t, g, side, expansion })
}

/// `⟨z'|e^{λX}|z⟩ / ⟨z'|z⟩`.
///
/// Creation-linear: `G(λ, z'^*)·exp([T(λ, z'^*) - z'^*]·z)`.
/// Annihilation-linear: `G(λ, z)·exp(z'^*·[T(λ, z) - z])`.
pub fn coherent_element(
    sym: &QvSymbol,
    side: Side,
    lambda: f64,
    zp: Complex64,
    z: Complex64,
    order: usize,
) -> Result<Complex64, FlowError> {
    let t = solve_t(&sym.q, &sym.center, order)?;
    let g = solve_g(&sym.v, &t, order)?;
    let (at, other) = match side {
        Side::CreationLinear => (zp.conj(), z),
        Side::AnnihilationLinear => (z, zp.conj()),
    };
    let lam = Complex64::new(lambda, 0.0);
    let (t_val, t_tail) = t.eval(lam, at);
    let (g_val, g_tail) = g.eval(lam, at);
    let shift = (t_val - at) * other;
    let value = g_val * shift.exp();
    // First-order propagation of both tails into the product.
    let tail = g_tail * shift.exp().norm() + g_val.norm() * shift.exp().norm() * t_tail * other.norm();
    if !tail.is_finite() || tail > EVAL_TOLERANCE {
        return Err(FlowError::SeriesTailTooLarge { tail, tolerance: EVAL_TOLERANCE });
    }
    Ok(value)
}

/// `⟨z|0⟩ = e^{-|z|²/2}`.
fn vacuum_overlap(z: Complex64) -> f64 {
    (-z.norm_sqr() / 2.0).exp()
}

fn sqrt_factorial(l: usize) -> f64 {
    (1..=l).map(|k| (k as f64).sqrt()).product()
}

/// `⟨z|M^n|l⟩ = s_{n+l}(z^*)·⟨z|0⟩/√(l!)` for the raising operator `M` of
/// `pair` written in bosons.
pub fn number_state_element(pair: &ShefferPair, n: usize, l: usize, z: Complex64) -> Result<Complex64, FlowError> {
    let seq = sequence_from_pair(pair, n + l)?;
    Ok(seq[n + l].eval_complex(z.conj()) * vacuum_overlap(z) / sqrt_factorial(l))
}

/// `⟨z|e^{λM}|l⟩ = (1/√l!)·d^l/dλ^l [A(λ)e^{z^*B(λ)}]·⟨z|0⟩`, summed from
/// the sequence as `Σ_n s_{n+l}(z^*) λ^n/n!`.
pub fn exponential_number_element(
    pair: &ShefferPair,
    lambda: f64,
    l: usize,
    z: Complex64,
) -> Result<Complex64, FlowError> {
    let top = pair.order();
    if top <= l + 1 {
        return Err(FlowError::OrderTooLow { have: top, need: l + 2 });
    }
    let seq = sequence_from_pair(pair, top)?;
    let zc = z.conj();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    let mut weight = 1.0; // λ^n / n!
    let last = top - l;
    for n in 0..=last {
        if n > 0 {
            weight *= lambda / n as f64;
        }
        let term = seq[n + l].eval_complex(zc) * weight;
        if n + 1 >= last {
            tail += term.norm();
        }
        sum += term;
    }
    if tail > EVAL_TOLERANCE {
        return Err(FlowError::SeriesTailTooLarge { tail, tolerance: EVAL_TOLERANCE });
    }
    Ok(sum * vacuum_overlap(z) / sqrt_factorial(l))
}

/// `A(λ) = G(λ, z')`, `B(λ) = T(λ, z') - z'` for real rational `z'`.
///
/// `q`, `v` are re-expanded about `z'` first (exact for polynomials), so
/// the evaluation reduces to reading constant terms.
pub fn sheffer_from_qv(sym: &QvSymbol, zprime: &Rational, order: usize) -> Result<(Series, Series), FlowError> {
    let sym = sym.recenter(zprime);
    let t = solve_t(&sym.q, &sym.center, order)?;
    let g = solve_g(&sym.v, &t, order)?;
    let mut b = t.at_center();
    b = b.sub(&Series::constant(zprime.clone(), b.order()));
    Ok((g.at_center(), b))
}

/// `q(x) = B'(B⁻¹(x - z'))`, `v(x) = A'(B⁻¹(x - z'))/A(B⁻¹(x - z'))`,
/// returned as series about `x = z'`. Only `A'/A` enters, so `A` and
/// `c·A` give the same symbol; [`sheffer_from_qv`] returns the `A(0) = 1`
/// representative.
pub fn qv_from_sheffer(a: &Series, b: &Series, zprime: &Rational) -> Result<QvSymbol, FlowError> {
    if a.constant_term().is_zero() {
        return Err(ShefferError::InvalidPair("A needs A(0) != 0").into());
    }
    let b_inv = b.revert()?;
    let q = b.deriv().compose(&b_inv)?;
    let log_da = a.deriv().div(a)?;
    let v = log_da.compose(&b_inv)?;
    Ok(QvSymbol { q, v, center: zprime.clone() })
}

/// The flow induced by a Sheffer pair:
/// `T(λ,x) = B(λ + B⁻¹(x - z')) + z'` and
/// `G(λ,x) = A(λ + B⁻¹(x - z'))/A(B⁻¹(x - z'))`, about `x = z'`.
pub fn induced_flow(a: &Series, b: &Series, zprime: &Rational, order: usize) -> Result<(BiSeries, BiSeries), FlowError> {
    let b_inv = b.revert()?;
    let mut t = compose_shifted(b, &b_inv, order)?;
    t[0] = t[0].add(&Series::constant(zprime.clone(), t[0].order()));
    let a_shift = compose_shifted(a, &b_inv, order)?;
    let denom = a.compose(&b_inv)?.recip()?;
    let g = a_shift.iter().map(|s| s.mul(&denom)).collect();
    Ok((BiSeries::new(zprime.clone(), t), BiSeries::new(zprime.clone(), g)))
}

/// `[λ^n μ^m]` of `F(λ + μ, x)`, for `n + m <= order`.
pub fn split_time(f: &BiSeries) -> Vec<Vec<Series>> {
    let order = f.lambda_order();
    (0..=order)
        .map(|n| {
            (0..=order - n)
                .map(|m| f.coeffs[n + m].scale(&Rational::from_integer(rational::binomial(n + m, n))))
                .collect()
        })
        .collect()
}

/// `[λ^n μ^m]` of `F(λ, T(μ, x))`, for `n + m <= order`.
pub fn substitute_flow(outer: &BiSeries, inner: &BiSeries) -> Vec<Vec<Series>> {
    let order = outer.lambda_order().min(inner.lambda_order());
    (0..=order)
        .map(|n| {
            let inner_n = inner.truncate(order - n);
            substitute(&outer.coeffs[n], &inner_n).coeffs
        })
        .collect()
}

/// Checks `T(λ+μ, x) = T(λ, T(μ, x))` and
/// `G(λ+μ, x) = G(μ, x)·G(λ, T(μ, x))` coefficient by coefficient.
/// Returns the first `(n, m)` where either identity fails.
pub fn semigroup_defect(sym: &QvSymbol, order: usize) -> Result<Option<(usize, usize)>, FlowError> {
    let t = solve_t(&sym.q, &sym.center, order)?;
    let g = solve_g(&sym.v, &t, order)?;
    let t_sum = split_time(&t);
    let t_nested = substitute_flow(&t, &t);
    let g_sum = split_time(&g);
    let g_nested = substitute_flow(&g, &t);
    for n in 0..=order {
        for m in 0..=(order - n) {
            let Some(tn) = t_nested[n].get(m) else { return Ok(Some((n, m))) };
            if !t_sum[n][m].agrees_with(tn) {
                return Ok(Some((n, m)));
            }
            // Σ_{m'} G_μ[m']·g_n(T_μ)[m - m']
            let mut rhs: Option<Series> = None;
            for mp in 0..=m {
                let Some(gn) = g_nested[n].get(m - mp) else { return Ok(Some((n, m))) };
                let term = g.coeffs[mp].mul(gn);
                rhs = Some(match rhs {
                    None => term,
                    Some(r) => r.add(&term),
                });
            }
            let rhs = rhs.expect("m >= 0 gives at least one term");
            if !g_sum[n][m].agrees_with(&rhs) {
                return Ok(Some((n, m)));
            }
        }
    }
    Ok(None)
}
