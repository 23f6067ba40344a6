//! Dense matrices on the truncated Fock space `span{|0⟩ .. |D-1⟩}`.
//!
//! This is the only floating-point surface in the crate. It exists to check
//! the exact results numerically, never to produce them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{BosonError, NormalForm};
use crate::rational;

/// Coherent-state probability mass allowed outside the truncated space.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    dim: usize,
    entries: DMatrix<f64>,
}

/// `√(n!/(n-k)!)`, the magnitude of `⟨n-k|a^k|n⟩`.
fn falling_sqrt(n: usize, k: usize) -> f64 {
    ((n - k + 1)..=n).map(|m| (m as f64).sqrt()).product()
}

impl FockMatrix {
    pub fn from_normal_form(x: &NormalForm, dim: usize) -> Self {
        assert!(dim >= 1, "Fock dimension must be at least 1");
        let mut entries = DMatrix::<f64>::zeros(dim, dim);
        for (i, j, c) in x.terms() {
            let (i, j) = (i as usize, j as usize);
            let c = rational::to_f64(c);
            // ⟨m|a†^i a^j|n⟩ is nonzero only for m = n - j + i.
            for n in j..dim {
                let m = n - j + i;
                if m >= dim {
                    break;
                }
                let mid = n - j;
                entries[(m, n)] += c * falling_sqrt(n, j) * falling_sqrt(m, m - mid);
            }
        }
        FockMatrix { dim, entries }
    }

    pub fn from_entries(entries: DMatrix<f64>) -> Self {
        assert!(entries.is_square());
        FockMatrix { dim: entries.nrows(), entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[(m, n)]
    }

    pub fn mul(&self, other: &FockMatrix) -> FockMatrix {
        FockMatrix { dim: self.dim, entries: &self.entries * &other.entries }
    }

    pub fn pow(&self, n: u32) -> FockMatrix {
        let mut acc = DMatrix::<f64>::identity(self.dim, self.dim);
        for _ in 0..n {
            acc = &acc * &self.entries;
        }
        FockMatrix { dim: self.dim, entries: acc }
    }

    /// `e^{λX}` on the truncated space, by scaling and squaring.
    pub fn exp(&self, lambda: f64) -> FockMatrix {
        FockMatrix { dim: self.dim, entries: (&self.entries * lambda).exp() }
    }

    /// `⟨z'|X|z⟩` with both coherent vectors expanded in the truncated basis.
    pub fn coherent_expectation(&self, zp: Complex64, z: Complex64) -> Result<Complex64, BosonError> {
        self.check_tail(zp)?;
        self.check_tail(z)?;
        let bra = coherent_vector(zp, self.dim);
        let ket = coherent_vector(z, self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..self.dim {
            let b = bra[m].conj();
            for n in 0..self.dim {
                let e = self.entries[(m, n)];
                if e != 0.0 {
                    acc += b * e * ket[n];
                }
            }
        }
        Ok(acc)
    }

    /// `⟨z|X|l⟩` for a number-state ket.
    pub fn coherent_number_element(&self, z: Complex64, l: usize) -> Result<Complex64, BosonError> {
        self.check_tail(z)?;
        let bra = coherent_vector(z, self.dim);
        Ok((0..self.dim).map(|m| bra[m].conj() * self.entries[(m, l)]).sum())
    }

    fn check_tail(&self, z: Complex64) -> Result<(), BosonError> {
        let tail = coherent_tail_mass(z, self.dim);
        if tail > TAIL_TOLERANCE {
            return Err(BosonError::TruncationTooSmall { dim: self.dim, tail, tolerance: TAIL_TOLERANCE });
        }
        Ok(())
    }
}

/// Components `e^{-|z|²/2} z^n/√n!` for `n < dim`.
pub fn coherent_vector(z: Complex64, dim: usize) -> DVector<Complex64> {
    let mut v = DVector::<Complex64>::zeros(dim);
    let mut c = Complex64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            c = c * z / (n as f64).sqrt();
        }
        v[n] = c;
    }
    v
}

/// `e^{-|z|²} Σ_{n≥dim} |z|^{2n}/n!`, the probability the truncation drops.
pub fn coherent_tail_mass(z: Complex64, dim: usize) -> f64 {
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        return 0.0;
    }
    // Start from the n = dim term in log space and sum until negligible.
    let ln_fact: f64 = (1..=dim).map(|k| (k as f64).ln()).sum();
    let mut term = (-r2 + dim as f64 * r2.ln() - ln_fact).exp();
    let mut sum = 0.0;
    let mut n = dim;
    while term > sum * 1e-17 && n < dim + 10_000 {
        sum += term;
        n += 1;
        term *= r2 / n as f64;
    }
    sum
}

/// `⟨z'|z⟩ = exp(z'^* z - |z|²/2 - |z'|²/2)`.
pub fn coherent_overlap(zp: Complex64, z: Complex64) -> Complex64 {
    (zp.conj() * z - z.norm_sqr() / 2.0 - zp.norm_sqr() / 2.0).exp()
}
