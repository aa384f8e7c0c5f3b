//! Dense complex operator matrices.
//!
//! [`OperatorMatrix`] is the universal carrier for Hamiltonians, coupling
//! operators and effective operators.  It is a square `Array2<Complex64>`
//! plus a Hermiticity flag that is tracked through the arithmetic helpers.

use ndarray::{linalg::kron, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance used to certify the `hermitian` flag.
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: Array2<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Zero operator of dimension `dim`.
    pub fn zeros(dim: usize) -> Self {
        Self { entries: Array2::zeros((dim, dim)), hermitian: true }
    }

    /// Identity operator of dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        Self { entries: Array2::eye(dim), hermitian: true }
    }

    /// Wrap an arbitrary square array; the Hermiticity flag is measured.
    pub fn from_array(entries: Array2<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::invalid(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let hermitian = max_abs_dev_from_hermitian(&entries) < HERMITICITY_TOL;
        Ok(Self { entries, hermitian })
    }

    /// Wrap an array that must be Hermitian within [`HERMITICITY_TOL`].
    pub fn hermitian_from_array(entries: Array2<C64>) -> Result<Self> {
        let m = Self::from_array(entries)?;
        if !m.hermitian {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian (max |A - A^dag| = {:e})",
                max_abs_dev_from_hermitian(&m.entries)
            )));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    pub fn hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn max_abs_dev_from_hermitian(&self) -> f64 {
        max_abs_dev_from_hermitian(&self.entries)
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: adjoint(&self.entries), hermitian: self.hermitian }
    }

    /// Kronecker product; `self` is the left (first) factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self {
            entries: kron(&self.entries, &rhs.entries),
            hermitian: self.hermitian && rhs.hermitian,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            entries: &self.entries + &rhs.entries,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            entries: &self.entries - &rhs.entries,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }

    /// Scale by a complex factor; Hermiticity survives only real factors.
    pub fn scale(&self, factor: C64) -> Self {
        Self {
            entries: self.entries.mapv(|z| z * factor),
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Matrix product (flag re-measured: products of Hermitians need not be Hermitian).
    pub fn matmul(&self, rhs: &Self) -> Self {
        let entries = self.entries.dot(&rhs.entries);
        let hermitian = max_abs_dev_from_hermitian(&entries) < HERMITICITY_TOL;
        Self { entries, hermitian }
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        let ab = self.entries.dot(&rhs.entries);
        let ba = rhs.entries.dot(&self.entries);
        Self::from_array(ab - ba).expect("square by construction")
    }

    /// Symmetrized product `(AB + BA)/2`.
    pub fn sym_product(&self, rhs: &Self) -> Self {
        let ab = self.entries.dot(&rhs.entries);
        let ba = rhs.entries.dot(&self.entries);
        Self::from_array((ab + ba).mapv(|z| z * 0.5)).expect("square by construction")
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        (&self.entries - &rhs.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// max_ij |A_ij - conj(A_ji)|
pub fn max_abs_dev_from_hermitian(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_flag_tracks_construction() {
        let h = OperatorMatrix::hermitian_from_array(ndarray::array![
            [c(1.0, 0.0), c(0.0, -1.0)],
            [c(0.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(h.hermitian());
        assert!(!h.scale(c(0.0, 1.0)).hermitian());
        assert!(h.scale_re(-2.0).hermitian());
        assert!(h.kron(&h).hermitian());

        let bad = OperatorMatrix::hermitian_from_array(ndarray::array![
            [c(1.0, 0.0), c(0.5, 0.0)],
            [c(0.0, 0.0), c(2.0, 0.0)],
        ]);
        assert!(bad.is_err());
    }

    #[test]
    fn rejects_non_square() {
        let r = OperatorMatrix::from_array(Array2::zeros((2, 3)));
        assert!(r.is_err());
    }

    #[test]
    fn commutator_of_commuting_is_zero() {
        let a = OperatorMatrix::identity(3).scale_re(2.5);
        let b = OperatorMatrix::identity(3).scale_re(-0.5);
        assert_eq!(a.commutator(&b).max_abs(), 0.0);
    }
}
