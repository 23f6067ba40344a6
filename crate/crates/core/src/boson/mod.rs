//! Normally ordered elements of the one-mode Weyl algebra `[a, a†] = 1`.
//!
//! A [`NormalForm`] stores `Σ c_ij a†^i a^j`. Products are reordered with the
//! closed form
//!
//! ```text
//! a^j a†^i = Σ_k k!·C(j,k)·C(i,k)·a†^(i-k) a^(j-k)
//! ```
//!
//! which is the only place the commutation relation is applied. Everything
//! else (powers, the exponential series, the brute-force oracle for the flow
//! module) is built on top of that kernel.

mod fock;

pub use fock::{coherent_overlap, coherent_tail_mass, coherent_vector, FockMatrix, TAIL_TOLERANCE};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::fps::Series;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BosonError {
    #[error("expression has degree >= 2 in both a and a-dagger")]
    NotLinear,
    #[error("coherent-state tail mass {tail:e} beyond Fock dimension {dim} exceeds {tolerance:e}")]
    TruncationTooSmall { dim: usize, tail: f64, tolerance: f64 },
}

/// Which letter the operator is linear in.
///
/// `CreationLinear` is the shape `q(a†)a + v(a†)` (linear in `a`, functions
/// of `a†`), `AnnihilationLinear` is its conjugate `a†q(a) + v(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    CreationLinear,
    AnnihilationLinear,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::CreationLinear => "creation-linear",
            Side::AnnihilationLinear => "annihilation-linear",
        }
    }
}

/// `Σ c_ij a†^i a^j` with no zero coefficients, keyed in `(i, j)` order.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NormalForm {
    terms: BTreeMap<(u32, u32), Rational>,
}

/// Coefficients of `a^j a†^i = Σ_k w_k a†^(i-k) a^(j-k)`, as `(k, w_k)`.
pub fn reorder_weights(j: u32, i: u32) -> Vec<(u32, BigInt)> {
    (0..=i.min(j))
        .map(|k| {
            let (k_, j_, i_) = (k as usize, j as usize, i as usize);
            let w = rational::factorial(k_) * rational::binomial(j_, k_) * rational::binomial(i_, k_);
            (k, w)
        })
        .collect()
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::default()
    }

    pub fn one() -> Self {
        Self::term(0, 0, Rational::one())
    }

    /// `c·a†^i a^j`.
    pub fn term(i: u32, j: u32, c: Rational) -> Self {
        let mut nf = NormalForm::zero();
        nf.add_term(i, j, c);
        nf
    }

    pub fn creation() -> Self {
        Self::term(1, 0, Rational::one())
    }

    pub fn annihilation() -> Self {
        Self::term(0, 1, Rational::one())
    }

    /// `a†a`.
    pub fn number() -> Self {
        Self::term(1, 1, Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, Rational)>>(terms: I) -> Self {
        let mut nf = NormalForm::zero();
        for (i, j, c) in terms {
            nf.add_term(i, j, c);
        }
        nf
    }

    /// The operator `q(a†)a + v(a†)` (creation-linear) or `a†q(a) + v(a)`
    /// (annihilation-linear) built from the known coefficients of `q`, `v`.
    pub fn from_linear(q: &Series, v: &Series, side: Side) -> Self {
        let mut nf = NormalForm::zero();
        for (k, c) in q.coeffs().iter().enumerate() {
            nf.add_term(k as u32, 1, c.clone());
        }
        for (k, c) in v.coeffs().iter().enumerate() {
            nf.add_term(k as u32, 0, c.clone());
        }
        match side {
            Side::CreationLinear => nf,
            Side::AnnihilationLinear => nf.conjugate(),
        }
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &Rational)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_creation_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn add(&self, other: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NormalForm) -> NormalForm {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> NormalForm {
        if c.is_zero() {
            return NormalForm::zero();
        }
        NormalForm { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Hermitian conjugate for real coefficients: `(i, j) -> (j, i)`.
    pub fn conjugate(&self) -> NormalForm {
        NormalForm { terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect() }
    }

    /// Normally ordered product `self · other`.
    pub fn normal_product(&self, other: &NormalForm) -> NormalForm {
        let mut out = NormalForm::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                let c = c1 * c2;
                for (k, w) in reorder_weights(j1, i2) {
                    out.add_term(i1 + i2 - k, j1 + j2 - k, &c * Rational::from_integer(w));
                }
            }
        }
        out
    }

    pub fn power(&self, n: u32) -> NormalForm {
        let mut acc = NormalForm::one();
        for _ in 0..n {
            acc = acc.normal_product(self);
        }
        acc
    }

    /// `[X^n / n!]` for `n = 0..=order`: the λ-coefficients of `e^{λX}` by
    /// repeated multiplication.
    pub fn exp_series(&self, order: usize) -> Vec<NormalForm> {
        let mut out = Vec::with_capacity(order + 1);
        let mut term = NormalForm::one();
        out.push(term.clone());
        for n in 1..=order {
            term = term.normal_product(self).scale(&rational::ratio(1, n as i64));
            out.push(term.clone());
        }
        out
    }

    /// `Σ c_ij x^i y^j` with commuting numbers substituted for `a†`, `a`.
    pub fn substitute(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| x.powu(i) * y.powu(j) * rational::to_f64(c))
            .sum()
    }

    /// `⟨z'|X|z⟩ = ⟨z'|z⟩·X(z'^*, z)`, valid because `X` is normally ordered.
    pub fn coherent_expectation(&self, zp: Complex64, z: Complex64) -> Complex64 {
        coherent_overlap(zp, z) * self.substitute(zp.conj(), z)
    }

    pub fn to_fock(&self, dim: usize) -> FockMatrix {
        FockMatrix::from_normal_form(self, dim)
    }
}

/// A letter of a raw (not yet ordered) operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    A,
    ADag,
}

/// One of the four written shapes of an operator linear in a single letter.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearShape {
    /// `q(a†)·a + v(a†)`
    QDaggerA { q: Series, v: Series },
    /// `a·q(a†) + v(a†)`
    AQDagger { q: Series, v: Series },
    /// `a†·q(a) + v(a)`
    DaggerQA { q: Series, v: Series },
    /// `q(a)·a† + v(a)`
    QADagger { q: Series, v: Series },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalLinear {
    pub q: Series,
    pub v: Series,
    pub side: Side,
}

/// Moves the single lone letter to its canonical side. Pushing `a` through
/// `q(a†)` (or `q(a)` through `a†`) adds `q'` to `v`.
pub fn canonicalize_linear(shape: &LinearShape) -> CanonicalLinear {
    let moved = |q: &Series, v: &Series| {
        let dq = if q.order() == 0 { Series::zero(0) } else { q.deriv() };
        v.add(&dq)
    };
    match shape {
        LinearShape::QDaggerA { q, v } => CanonicalLinear { q: q.clone(), v: v.clone(), side: Side::CreationLinear },
        LinearShape::AQDagger { q, v } => {
            CanonicalLinear { q: q.clone(), v: moved(q, v), side: Side::CreationLinear }
        }
        LinearShape::DaggerQA { q, v } => {
            CanonicalLinear { q: q.clone(), v: v.clone(), side: Side::AnnihilationLinear }
        }
        LinearShape::QADagger { q, v } => {
            CanonicalLinear { q: q.clone(), v: moved(q, v), side: Side::AnnihilationLinear }
        }
    }
}

/// Canonicalizes a sum of raw words. Words must contain at most one `a`
/// (creation-linear) or at most one `a†` (annihilation-linear); `prefer`
/// breaks the tie when both hold.
pub fn canonicalize_words(
    words: &[(Rational, Vec<Letter>)],
    prefer: Side,
) -> Result<CanonicalLinear, BosonError> {
    let count = |w: &[Letter], l: Letter| w.iter().filter(|&&x| x == l).count();
    let linear_in = |lone: Letter| words.iter().all(|(_, w)| count(w, lone) <= 1);
    let side = match prefer {
        Side::CreationLinear if linear_in(Letter::A) => Side::CreationLinear,
        Side::AnnihilationLinear if linear_in(Letter::ADag) => Side::AnnihilationLinear,
        _ if linear_in(Letter::A) => Side::CreationLinear,
        _ if linear_in(Letter::ADag) => Side::AnnihilationLinear,
        _ => return Err(BosonError::NotLinear),
    };
    let lone = match side {
        Side::CreationLinear => Letter::A,
        Side::AnnihilationLinear => Letter::ADag,
    };
    let order = words.iter().map(|(_, w)| w.len()).max().unwrap_or(0).max(1);
    let mut q = vec![Rational::zero(); order + 1];
    let mut v = vec![Rational::zero(); order + 1];
    for (c, w) in words {
        match w.iter().position(|&l| l == lone) {
            None => v[w.len()] += c,
            Some(pos) => {
                // a†^p·a·a†^r = a†^(p+r)·a + r·a†^(p+r-1), and
                // a^p·a†·a^r = a†·a^(p+r) + p·a^(p+r-1).
                let (p, r) = (pos, w.len() - pos - 1);
                let passed = match side {
                    Side::CreationLinear => r,
                    Side::AnnihilationLinear => p,
                };
                q[p + r] += c;
                if passed > 0 {
                    v[p + r - 1] += c * rational::int(passed as i64);
                }
            }
        }
    }
    Ok(CanonicalLinear { q: Series::new(q, order), v: Series::new(v, order), side })
}

#[derive(Serialize, Deserialize)]
struct NormalFormRepr {
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    i: u32,
    j: u32,
    #[serde(with = "rational::serde_pq")]
    c: Rational,
}

impl Serialize for NormalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(&(i, j), c)| TermRepr { i, j, c: c.clone() })
            .collect();
        NormalFormRepr { terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = NormalFormRepr::deserialize(d)?;
        Ok(NormalForm::from_terms(repr.terms.into_iter().map(|t| (t.i, t.j, t.c))))
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (n, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts = Vec::new();
            if !mag.is_one() || (i == 0 && j == 0) {
                parts.push(mag.to_string());
            }
            match i {
                0 => {}
                1 => parts.push("a†".to_string()),
                _ => parts.push(format!("a†^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push("a".to_string()),
                _ => parts.push(format!("a^{j}")),
            }
            write!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormalForm({self})")
    }
}
