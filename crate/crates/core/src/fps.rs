//! Truncated formal power series with exact rational coefficients.
//!
//! A [`Series`] of order `N` knows the coefficients of `x^0 ..= x^N` exactly;
//! everything from `x^(N+1)` on is unknown. Binary operations keep the smaller
//! of the operands' orders, and operations that lose information (derivative,
//! reversion of a truncated input) lower the order accordingly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// Truncation order used when a caller does not ask for one.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FpsError {
    #[error("division by a series with zero constant term")]
    DivisionByNonUnit,
    #[error("composition requires an inner series with zero constant term")]
    CompositionNonNilpotent,
    #[error("reversion requires f(0) = 0 and f'(0) != 0")]
    ReversionNotDefined,
    #[error("exp requires a series with zero constant term")]
    ExpOfUnit,
    #[error("log requires a series with constant term 1")]
    LogOfNonUnit,
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct Series {
    // Invariant: len == order + 1.
    coeffs: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    #[serde(with = "rational::serde_pq_vec")]
    coeffs: Vec<Rational>,
}

impl TryFrom<SeriesRepr> for Series {
    type Error = String;

    fn try_from(r: SeriesRepr) -> Result<Self, String> {
        if r.coeffs.len() != r.order + 1 {
            return Err(format!(
                "series of order {} needs {} coefficients, got {}",
                r.order,
                r.order + 1,
                r.coeffs.len()
            ));
        }
        Ok(Series { coeffs: r.coeffs })
    }
}

impl From<Series> for SeriesRepr {
    fn from(s: Series) -> Self {
        SeriesRepr { order: s.order(), coeffs: s.coeffs }
    }
}

impl Series {
    /// Builds a series of the given order; missing coefficients are zero and
    /// extra ones are dropped.
    pub fn new(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        Series { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| rational::int(c)).collect(), order)
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The identity series `x`.
    pub fn x(order: usize) -> Self {
        Self::new(vec![Rational::zero(), Rational::one()], order)
    }

    /// `c·x^k`.
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; zero beyond the order is *not* implied, so this
    /// panics there.
    pub fn coeff(&self, k: usize) -> &Rational {
        assert!(k <= self.order(), "x^{k} is beyond the truncation order {}", self.order());
        &self.coeffs[k]
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the highest nonzero known coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise the order of a truncated series");
        Series { coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Re-declares the order, padding with zeros. Only sound when the caller
    /// knows the series is a polynomial of degree at most `order`.
    pub fn with_order_padded(&self, order: usize) -> Self {
        Self::new(self.coeffs.clone(), order)
    }

    /// True when both agree on every coefficient they both know.
    pub fn agrees_with(&self, other: &Series) -> bool {
        let n = self.order().min(other.order());
        self.coeffs[..=n] == other.coeffs[..=n]
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Series { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &Series) -> Self {
        let n = self.order().min(other.order());
        Series { coeffs: (0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect() }
    }

    pub fn sub(&self, other: &Series) -> Self {
        let n = self.order().min(other.order());
        Series { coeffs: (0..=n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect() }
    }

    pub fn neg(&self) -> Self {
        Series { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Series) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series { coeffs: out }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Series::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse.
    pub fn recip(&self) -> Result<Self, FpsError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(FpsError::DivisionByNonUnit);
        }
        let n = self.order();
        let inv0 = a0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = Rational::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &out[k - i];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(Series { coeffs: out })
    }

    pub fn div(&self, other: &Series) -> Result<Self, FpsError> {
        Ok(self.mul(&other.recip()?))
    }

    /// `outer(inner(x))` for an inner series without constant term.
    pub fn compose(&self, inner: &Series) -> Result<Self, FpsError> {
        if !inner.coeffs[0].is_zero() {
            return Err(FpsError::CompositionNonNilpotent);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        // Horner from the top known coefficient.
        let mut acc = Series::constant(self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse by the Lagrange inversion formula
    /// `[x^n] f⁻¹ = (1/n)·[x^(n-1)] (x/f)^n`.
    pub fn revert(&self) -> Result<Self, FpsError> {
        if self.order() < 1 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(FpsError::ReversionNotDefined);
        }
        let n = self.order();
        // f = x·h with h(0) = f'(0); h is known to order n-1.
        let h = Series { coeffs: self.coeffs[1..].to_vec() };
        let h_inv = h.recip().expect("h(0) = f'(0) is nonzero");
        let mut out = vec![Rational::zero(); n + 1];
        let mut power = Series::one(n - 1);
        for k in 1..=n {
            power = power.mul(&h_inv);
            out[k] = power.coeffs[k - 1].clone() / rational::int(k as i64);
        }
        Ok(Series { coeffs: out })
    }

    pub fn deriv(&self) -> Self {
        let n = self.order();
        assert!(n >= 1, "derivative of an order-0 series has no known coefficients");
        Series {
            coeffs: (1..=n).map(|k| &self.coeffs[k] * rational::int(k as i64)).collect(),
        }
    }

    /// Antiderivative with zero constant term; gains one order.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / rational::int(k as i64 + 1));
        }
        Series { coeffs }
    }

    pub fn exp(&self) -> Result<Self, FpsError> {
        if !self.coeffs[0].is_zero() {
            return Err(FpsError::ExpOfUnit);
        }
        let n = self.order();
        // e' = s'·e
        let mut out = vec![Rational::one()];
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * rational::int(k as i64) * &out[m - k];
                }
            }
            out.push(acc / rational::int(m as i64));
        }
        Ok(Series { coeffs: out })
    }

    pub fn log(&self) -> Result<Self, FpsError> {
        if !self.coeffs[0].is_one() {
            return Err(FpsError::LogOfNonUnit);
        }
        if self.order() == 0 {
            return Ok(Series::zero(0));
        }
        let quotient = self.deriv().div(&self.truncate(self.order() - 1))?;
        Ok(quotient.integrate())
    }

    /// `s^e` for rational `e`, defined through `exp(e·log s)`; needs `s(0) = 1`.
    pub fn pow_rational(&self, e: &Rational) -> Result<Self, FpsError> {
        self.log()?.scale(e).exp()
    }

    /// Taylor shift `f(x + c)`, re-expanded term by term. The known
    /// coefficients are treated as the whole function, so the result is exact
    /// when `f` is a polynomial of degree at most its order.
    pub fn shift(&self, c: &Rational) -> Self {
        let n = self.order();
        let mut out = vec![Rational::zero(); n + 1];
        for (k, fk) in self.coeffs.iter().enumerate() {
            if fk.is_zero() {
                continue;
            }
            let mut cpow = Rational::one();
            for m in (0..=k).rev() {
                out[m] += fk * &cpow * Rational::from_integer(rational::binomial(k, m));
                cpow *= c;
            }
        }
        Series { coeffs: out }
    }

    /// Exact evaluation of the known coefficients as a polynomial.
    pub fn eval_rational(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Numeric evaluation of the known coefficients, together with the
    /// magnitude of the last two included terms as a tail estimate.
    pub fn eval_complex(&self, x: Complex64) -> (Complex64, f64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut xp = Complex64::new(1.0, 0.0);
        let n = self.order();
        let mut tail = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let term = xp * rational::to_f64(c);
            if k + 1 >= n {
                tail += term.norm();
            }
            sum += term;
            xp *= x;
        }
        (sum, tail)
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series::add(self, rhs)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series::sub(self, rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(self)
    }
}

/// Common elementary series, all exact.
pub mod elementary {
    use super::*;

    /// `e^x`.
    pub fn exp_x(order: usize) -> Series {
        let mut c = Vec::with_capacity(order + 1);
        let mut f = BigInt::one();
        for k in 0..=order {
            if k > 0 {
                f *= BigInt::from(k);
            }
            c.push(Rational::new(BigInt::one(), f.clone()));
        }
        Series::new(c, order)
    }

    /// `log(1 + x)`.
    pub fn log1p(order: usize) -> Series {
        let c = (0..=order)
            .map(|k| {
                if k == 0 {
                    Rational::zero()
                } else {
                    let sign = if k % 2 == 1 { 1 } else { -1 };
                    rational::ratio(sign, k as i64)
                }
            })
            .collect();
        Series::new(c, order)
    }

    /// `1/(1 - x)`.
    pub fn geometric(order: usize) -> Series {
        Series::new(vec![Rational::one(); order + 1], order)
    }

    pub fn sin(order: usize) -> Series {
        trig(order, 1)
    }

    pub fn cos(order: usize) -> Series {
        trig(order, 0)
    }

    fn trig(order: usize, parity: usize) -> Series {
        let c = (0..=order)
            .map(|k| {
                if k % 2 != parity {
                    Rational::zero()
                } else {
                    let sign = if (k / 2) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                    Rational::new(sign, rational::factorial(k))
                }
            })
            .collect();
        Series::new(c, order)
    }

    pub fn tan(order: usize) -> Series {
        sin(order).div(&cos(order)).expect("cos(0) = 1")
    }

    /// `arctan(x)` as the integral of `1/(1 + x²)`.
    pub fn arctan(order: usize) -> Series {
        let one_plus_sq = Series::from_ints(&[1, 0, 1], order.max(1) - 1);
        one_plus_sq.recip().expect("unit").integrate()
    }

    /// Formal Lambert W: the compositional inverse of `x e^x`.
    pub fn lambert_w(order: usize) -> Series {
        Series::x(order).mul(&exp_x(order)).revert().expect("x e^x is reversible")
    }
}

impl Series {
    /// Like `Display`, with `var` in place of `x`, e.g. `"(x - 1)"`.
    pub fn display_in(&self, var: &str) -> String {
        let mut out = String::new();
        write_terms(&mut out, &self.coeffs, var).expect("writing to a String");
        out.push_str(&format!(" + O({var}^{})", self.order() + 1));
        out
    }

    /// The known terms only, without the `O(..)` remainder.
    pub fn display_terms(&self, var: &str) -> String {
        let mut out = String::new();
        write_terms(&mut out, &self.coeffs, var).expect("writing to a String");
        out
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}

/// Writes `c0 + c1*v + c2*v^2 ...`, skipping zero terms.
pub(crate) fn write_terms(f: &mut impl fmt::Write, coeffs: &[Rational], var: &str) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
        }
        first = false;
        match (k, mag.is_one()) {
            (0, _) => write!(f, "{mag}")?,
            (_, true) => write!(f, "{var}")?,
            (_, false) => write!(f, "{mag}*{var}")?,
        }
        if k > 1 {
            write!(f, "^{k}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::elementary::*;
    use super::*;
    use crate::rational::{int, ratio};

    fn s(c: &[i64], n: usize) -> Series {
        Series::from_ints(c, n)
    }

    #[test]
    fn difference_of_squares() {
        let p = s(&[1, 1], 4).mul(&s(&[1, -1], 4));
        assert_eq!(p, s(&[1, 0, -1], 4));
    }

    #[test]
    fn exp_squared_is_exp_2x() {
        let e = exp_x(4);
        let sq = e.mul(&e);
        let expected = Series::new(
            vec![int(1), int(2), int(2), ratio(4, 3), ratio(2, 3)],
            4,
        );
        assert_eq!(sq, expected);
    }

    #[test]
    fn order_is_min_of_operands() {
        let p = s(&[1, 1], 3).mul(&s(&[1, 2, 3], 7));
        assert_eq!(p.order(), 3);
        assert_eq!(s(&[1], 2).add(&s(&[1], 5)).order(), 2);
    }

    #[test]
    fn geometric_and_its_square() {
        let one_minus_x = s(&[1, -1], 8);
        assert_eq!(Series::one(8).div(&one_minus_x).unwrap(), geometric(8));
        let sq = one_minus_x.mul(&one_minus_x);
        let q = Series::one(8).div(&sq).unwrap();
        let expected = Series::from_ints(&[1, 2, 3, 4, 5, 6, 7, 8, 9], 8);
        assert_eq!(q, expected);
        assert_eq!(q.mul(&sq), Series::one(8));
    }

    #[test]
    fn division_by_non_unit() {
        assert_eq!(Series::one(3).div(&Series::x(3)), Err(FpsError::DivisionByNonUnit));
    }

    #[test]
    fn compose_basics() {
        let sq = s(&[0, 0, 1], 6);
        let inner = s(&[0, 1, 1], 6);
        assert_eq!(sq.compose(&inner).unwrap(), s(&[0, 0, 1, 2, 1], 6));
        let back = exp_x(10).compose(&log1p(10)).unwrap();
        assert_eq!(back, s(&[1, 1], 10));
        assert_eq!(
            exp_x(4).compose(&Series::one(4)),
            Err(FpsError::CompositionNonNilpotent)
        );
    }

    #[test]
    fn exp_of_forest_series() {
        // e^{x/(1-x)}: 1, 1, 3, 13, 73 as EGF coefficients.
        let inner = Series::x(6).mul(&geometric(6));
        let e = exp_x(6).compose(&inner).unwrap();
        let egf: Vec<Rational> = (0..=4)
            .map(|k| e.coeff(k) * Rational::from_integer(rational::factorial(k)))
            .collect();
        assert_eq!(egf, vec![int(1), int(1), int(3), int(13), int(73)]);
    }

    #[test]
    fn geometric_of_x_exp_x_matches_power_sum() {
        // Oracle: sum of (x e^x)^k for k <= order, expanded independently.
        let n = 6;
        let u = Series::x(n).mul(&exp_x(n));
        let mut oracle = Series::zero(n);
        let mut p = Series::one(n);
        for _ in 0..=n {
            oracle = oracle.add(&p);
            p = p.mul(&u);
        }
        assert_eq!(geometric(n).compose(&u).unwrap(), oracle);
        // n!·[x^n]: 1, 1, 4, 21, 148
        let egf: Vec<Rational> = (0..=4)
            .map(|k| oracle.coeff(k) * Rational::from_integer(rational::factorial(k)))
            .collect();
        assert_eq!(egf, vec![int(1), int(1), int(4), int(21), int(148)]);
    }

    #[test]
    fn revert_examples() {
        assert_eq!(Series::x(5).revert().unwrap(), Series::x(5));
        let f = Series::new(vec![int(0), int(1), ratio(-1, 2)], 6);
        let g = f.revert().unwrap();
        assert_eq!(&g.coeffs()[..5], &[int(0), int(1), ratio(1, 2), ratio(1, 2), ratio(5, 8)]);
        assert_eq!(f.compose(&g).unwrap(), Series::x(6));
    }

    #[test]
    fn lambert_w_coefficients() {
        let w = lambert_w(10);
        for n in 1..=10usize {
            let num = BigInt::from(-(n as i64)).pow(n as u32 - 1);
            let expected = Rational::new(num, rational::factorial(n));
            assert_eq!(w.coeff(n), &expected, "n = {n}");
        }
    }

    #[test]
    fn revert_preconditions() {
        assert_eq!(s(&[1, 1], 4).revert(), Err(FpsError::ReversionNotDefined));
        assert_eq!(s(&[0, 0, 1], 4).revert(), Err(FpsError::ReversionNotDefined));
    }

    #[test]
    fn exp_log_edge_cases() {
        assert_eq!(Series::zero(5).exp().unwrap(), Series::one(5));
        assert_eq!(Series::one(5).log().unwrap(), Series::zero(5));
        assert_eq!(Series::one(5).exp(), Err(FpsError::ExpOfUnit));
        assert_eq!(Series::x(5).log(), Err(FpsError::LogOfNonUnit));
        assert_eq!(s(&[1, 1], 8).log().unwrap(), log1p(8));
    }

    #[test]
    fn deriv_and_integrate() {
        let cube = s(&[0, 0, 0, 1], 5);
        assert_eq!(cube.deriv(), s(&[0, 0, 3], 4));
        let p = s(&[3, 1, 4, 1, 5], 4);
        assert_eq!(p.integrate().order(), 5);
        assert_eq!(p.integrate().deriv(), p);
    }

    #[test]
    fn bell_polynomials_from_exponential() {
        // exp(x·(e^λ - 1)) with x = 2: λ^n coefficient is B_n(2)/n!.
        let b = exp_x(6).sub(&Series::one(6)).scale(&int(2));
        let g = b.exp().unwrap();
        let bell2 = [1, 2, 6, 22, 94, 454, 2430];
        for (n, want) in bell2.iter().enumerate() {
            let got = g.coeff(n) * Rational::from_integer(rational::factorial(n));
            assert_eq!(got, int(*want));
        }
    }

    #[test]
    fn shift_polynomial() {
        // (x+1)^2 = 1 + 2x + x^2
        assert_eq!(s(&[0, 0, 1], 4).shift(&int(1)), s(&[1, 2, 1], 4));
        let p = s(&[2, -1, 0, 3], 5);
        assert_eq!(p.shift(&int(2)).shift(&int(-2)), p);
    }

    #[test]
    fn elementary_identities() {
        let n = 12;
        let t = tan(n);
        assert_eq!(arctan(n).compose(&t).unwrap(), Series::x(n));
        let c = cos(n);
        let sn = sin(n);
        assert_eq!(c.mul(&c).add(&sn.mul(&sn)), Series::one(n));
    }

    #[test]
    fn display_and_json() {
        let p = Series::new(vec![int(1), int(0), ratio(-1, 2), int(3)], 4);
        assert_eq!(p.to_string(), "1 - 1/2*x^2 + 3*x^3 + O(x^5)");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"order":4,"coeffs":["1/1","0/1","-1/2","3/1","0/1"]}"#);
        let back: Series = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Series>(r#"{"order":3,"coeffs":["1/1"]}"#).is_err());
    }
}
