//! Spin quantum numbers and the ladder-operator construction of spin matrices.
//!
//! Basis convention used everywhere in this crate: for a spin `s`, basis
//! index `r` labels the projection `M = s - r`, i.e. the basis runs over
//! descending `M` from `+s` down to `-s`.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;

/// A non-negative half-integer spin quantum number, stored as `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    /// Build from `2s` directly (always valid).
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    /// Build from a floating value; errors unless `2s` is a non-negative integer.
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::invalid(format!("spin must be a non-negative half-integer, got {s}")));
        }
        let twice = 2.0 * s;
        let rounded = twice.round();
        if (twice - rounded).abs() > 1e-9 {
            return Err(Error::invalid(format!("spin must be a half-integer, got {s}")));
        }
        Ok(Self { twice: rounded as u32 })
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    /// Hilbert-space dimension `2s + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Casimir eigenvalue `s(s+1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }

    /// Projection `M` carried by basis index `r` (descending-M convention).
    pub fn projection(self, r: usize) -> f64 {
        self.value() - r as f64
    }
}

/// The set of spin matrices for one spin, all of dimension `2s + 1`.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub s: Spin,
    pub sx: OperatorMatrix,
    pub sy: OperatorMatrix,
    pub sz: OperatorMatrix,
    pub splus: OperatorMatrix,
    pub sminus: OperatorMatrix,
}

/// Ladder coefficient `sqrt(s(s+1) - M(M+1))` for `S+|s,M> = gamma |s,M+1>`.
pub fn ladder_coeff(s: Spin, m: f64) -> f64 {
    (s.casimir() - m * (m + 1.0)).max(0.0).sqrt()
}

/// Construct the spin matrices for quantum number `s`.
pub fn spin_matrices(s: Spin) -> SpinOps {
    let dim = s.dim();
    let mut sz = Array2::<C64>::zeros((dim, dim));
    let mut splus = Array2::<C64>::zeros((dim, dim));
    for r in 0..dim {
        let m = s.projection(r);
        sz[(r, r)] = C64::new(m, 0.0);
        // S+ maps |M> (row index r) to |M+1> (row index r-1).
        if r > 0 {
            splus[(r - 1, r)] = C64::new(ladder_coeff(s, m), 0.0);
        }
    }
    let sminus = crate::matrix::adjoint(&splus);
    let sx = (&splus + &sminus).mapv(|z| z * 0.5);
    let sy = (&splus - &sminus).mapv(|z| z * C64::new(0.0, -0.5));
    SpinOps {
        s,
        sx: OperatorMatrix::from_array(sx).expect("square"),
        sy: OperatorMatrix::from_array(sy).expect("square"),
        sz: OperatorMatrix::from_array(sz).expect("square"),
        splus: OperatorMatrix::from_array(splus).expect("square"),
        sminus: OperatorMatrix::from_array(sminus).expect("square"),
    }
}

/// Checked entry point matching the public contract: errors on non-half-integer `s`.
pub fn spin_matrices_checked(s: f64) -> Result<SpinOps> {
    Ok(spin_matrices(Spin::new(s)?))
}

impl SpinOps {
    /// Cartesian component by axis index (0 = x, 1 = y, 2 = z).
    pub fn axis(&self, k: usize) -> &OperatorMatrix {
        match k {
            0 => &self.sx,
            1 => &self.sy,
            2 => &self.sz,
            _ => panic!("axis index out of range"),
        }
    }
}
