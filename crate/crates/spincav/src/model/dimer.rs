//! Two-ion dimer with independently oriented anisotropy axes.
//!
//! Ion 2's diagonal g-tensor is rotated by `theta` in the x-z plane before
//! use; the product basis is `ion 1 (x) ion 2` with the descending-M
//! convention inside each factor.

use crate::constants::MU_B_GHZ_PER_T;
use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::model::spin::{spin_matrices, Spin, SpinOps};
use crate::model::{CouplingVector, FieldVector};

#[derive(Debug, Clone)]
pub struct DimerConfig {
    pub s1: Spin,
    pub s2: Spin,
    /// Diagonal g-tensor of ion 1 in its own frame (shared with the lab frame).
    pub g1_diag: [f64; 3],
    /// Diagonal g-tensor of ion 2 in its local anisotropy frame.
    pub g2_diag: [f64; 3],
    /// Angle between the two anisotropy z-axes, radians, rotation in the x-z plane.
    pub theta: f64,
    /// Exchange energy in GHz (scalar interaction-tensor form).
    pub j12_ghz: f64,
    /// Lande factors entering the exchange prefactor `J12 / (gJ1 gJ2)`.
    pub gj1: f64,
    pub gj2: f64,
}

impl DimerConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !(0.0..std::f64::consts::PI).contains(&self.theta) {
            return Err(Error::invalid(format!("theta must lie in [0, pi), got {}", self.theta)));
        }
        if !self.j12_ghz.is_finite() {
            return Err(Error::invalid("j12 must be finite"));
        }
        if self.gj1 == 0.0 || self.gj2 == 0.0 || !self.gj1.is_finite() || !self.gj2.is_finite() {
            return Err(Error::invalid("Lande factors must be finite and non-zero"));
        }
        if self.g1_diag.iter().chain(&self.g2_diag).any(|v| !v.is_finite()) {
            return Err(Error::invalid("g-tensor entries must be finite"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.s1.dim() * self.s2.dim()
    }

    /// Ion 2's g-tensor rotated into the lab frame: `R g2 R^T` with the x-z
    /// plane rotation `R = [[cos, 0, sin], [0, 1, 0], [-sin, 0, cos]]`.
    pub fn g2_rotated(&self) -> [[f64; 3]; 3] {
        let (st, ct) = self.theta.sin_cos();
        let [gx, gy, gz] = self.g2_diag;
        let cross = (gz - gx) * ct * st;
        [
            [gx * ct * ct + gz * st * st, 0.0, cross],
            [0.0, gy, 0.0],
            [cross, 0.0, gz * ct * ct + gx * st * st],
        ]
    }
}

/// Spin operators of both ions embedded in the product space (ion 1 first).
pub(crate) struct EmbeddedPair {
    pub s1: [OperatorMatrix; 3],
    pub s2: [OperatorMatrix; 3],
}

pub(crate) fn embedded_pair(s1: Spin, s2: Spin) -> EmbeddedPair {
    let ops1 = spin_matrices(s1);
    let ops2 = spin_matrices(s2);
    let id1 = OperatorMatrix::identity(s1.dim());
    let id2 = OperatorMatrix::identity(s2.dim());
    let embed1 = |o: &SpinOps, k: usize| o.axis(k).kron(&id2);
    let embed2 = |o: &SpinOps, k: usize| id1.kron(o.axis(k));
    EmbeddedPair {
        s1: [embed1(&ops1, 0), embed1(&ops1, 1), embed1(&ops1, 2)],
        s2: [embed2(&ops2, 0), embed2(&ops2, 1), embed2(&ops2, 2)],
    }
}

/// `H = -mu_B sum_i B.g_i.S_i - J12/(gJ1 gJ2) (g1.S1).(g2.S2)`, g2 rotated.
pub fn dimer_hamiltonian(cfg: &DimerConfig, b: &FieldVector) -> Result<OperatorMatrix> {
    cfg.validate()?;
    b.validate()?;
    let pair = embedded_pair(cfg.s1, cfg.s2);
    let g1 = crate::model::giant::diag3(cfg.g1_diag);
    let g2 = cfg.g2_rotated();
    let bvec = [b.bx, b.by, b.bz];

    let mut h = OperatorMatrix::zeros(cfg.dim());
    for (j, &bj) in bvec.iter().enumerate() {
        if bj == 0.0 {
            continue;
        }
        for k in 0..3 {
            let w1 = -MU_B_GHZ_PER_T * bj * g1[j][k];
            if w1 != 0.0 {
                h = h.add(&pair.s1[k].scale_re(w1));
            }
            let w2 = -MU_B_GHZ_PER_T * bj * g2[j][k];
            if w2 != 0.0 {
                h = h.add(&pair.s2[k].scale_re(w2));
            }
        }
    }

    // (g1.S1).(g2.S2) = sum_k (sum_a g1[k][a] S1_a) (sum_b g2[k][b] S2_b)
    let jw = -cfg.j12_ghz / (cfg.gj1 * cfg.gj2);
    for k in 0..3 {
        let mut left = OperatorMatrix::zeros(cfg.dim());
        let mut right = OperatorMatrix::zeros(cfg.dim());
        for a in 0..3 {
            if g1[k][a] != 0.0 {
                left = left.add(&pair.s1[a].scale_re(g1[k][a]));
            }
            if g2[k][a] != 0.0 {
                right = right.add(&pair.s2[a].scale_re(g2[k][a]));
            }
        }
        h = h.add(&left.matmul(&right).scale_re(jw));
    }
    Ok(h)
}

/// Cavity coupling `V = sum_i lam.g_i.S_i` with the rotated ion-2 tensor.
pub fn dimer_coupling(cfg: &DimerConfig, lam: &CouplingVector) -> Result<OperatorMatrix> {
    cfg.validate()?;
    lam.validate()?;
    let pair = embedded_pair(cfg.s1, cfg.s2);
    let g1 = crate::model::giant::diag3(cfg.g1_diag);
    let g2 = cfg.g2_rotated();
    let mut v = OperatorMatrix::zeros(cfg.dim());
    for (j, &lj) in lam.electronic.iter().enumerate() {
        if lj == 0.0 {
            continue;
        }
        for k in 0..3 {
            if g1[j][k] != 0.0 {
                v = v.add(&pair.s1[k].scale_re(lj * g1[j][k]));
            }
            if g2[j][k] != 0.0 {
                v = v.add(&pair.s2[k].scale_re(lj * g2[j][k]));
            }
        }
    }
    Ok(v)
}
