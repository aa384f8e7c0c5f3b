//! Coupled electron-nucleus spin system with hyperfine and quadrupolar terms.
//!
//! Product basis: `electron (x) nucleus`, each factor in the descending-M
//! convention.

use crate::constants::{MU_B_GHZ_PER_T, MU_N_GHZ_PER_T};
use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::model::spin::{spin_matrices, Spin};
use crate::model::{CouplingVector, FieldVector};

#[derive(Debug, Clone)]
pub struct ElectroNuclearConfig {
    /// Electronic spin.
    pub s: Spin,
    /// Nuclear spin.
    pub i: Spin,
    /// Electronic g-tensor `(g_perp, g_perp, g_par)`.
    pub g_perp: f64,
    pub g_par: f64,
    /// Nuclear g-factor (dimensionless, signed).
    pub g_i: f64,
    /// Hyperfine energies in GHz.
    pub a_par_ghz: f64,
    pub a_perp_ghz: f64,
    /// Quadrupolar energy `p` in GHz (enters as `p Iz^2`).
    pub p_ghz: f64,
}

impl ElectroNuclearConfig {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.g_perp, self.g_par, self.g_i, self.a_par_ghz, self.a_perp_ghz, self.p_ghz];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("electronuclear parameters must be finite"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.s.dim() * self.i.dim()
    }

    pub fn g_electron_diag(&self) -> [f64; 3] {
        [self.g_perp, self.g_perp, self.g_par]
    }
}

/// Electron and nuclear operators embedded in the product space.
pub(crate) struct EmbeddedElectroNuclear {
    pub s: [OperatorMatrix; 3],
    pub i: [OperatorMatrix; 3],
}

pub(crate) fn embedded_ops(s: Spin, i: Spin) -> EmbeddedElectroNuclear {
    let sops = spin_matrices(s);
    let iops = spin_matrices(i);
    let ids = OperatorMatrix::identity(s.dim());
    let idi = OperatorMatrix::identity(i.dim());
    EmbeddedElectroNuclear {
        s: [sops.sx.kron(&idi), sops.sy.kron(&idi), sops.sz.kron(&idi)],
        i: [ids.kron(&iops.sx), ids.kron(&iops.sy), ids.kron(&iops.sz)],
    }
}

/// `H = mu_B B.g.S + mu_N g_I B.I + p Iz^2 + A_par Sz Iz + A_perp (Sx Ix + Sy Iy)`.
pub fn electronuclear_hamiltonian(cfg: &ElectroNuclearConfig, b: &FieldVector) -> Result<OperatorMatrix> {
    cfg.validate()?;
    b.validate()?;
    let ops = embedded_ops(cfg.s, cfg.i);
    let g = cfg.g_electron_diag();
    let bvec = [b.bx, b.by, b.bz];

    let mut h = OperatorMatrix::zeros(cfg.dim());
    for j in 0..3 {
        if bvec[j] == 0.0 {
            continue;
        }
        h = h.add(&ops.s[j].scale_re(MU_B_GHZ_PER_T * bvec[j] * g[j]));
        h = h.add(&ops.i[j].scale_re(MU_N_GHZ_PER_T * cfg.g_i * bvec[j]));
    }
    h = h.add(&ops.i[2].matmul(&ops.i[2]).scale_re(cfg.p_ghz));
    h = h.add(&ops.s[2].matmul(&ops.i[2]).scale_re(cfg.a_par_ghz));
    h = h.add(&ops.s[0].matmul(&ops.i[0]).scale_re(cfg.a_perp_ghz));
    h = h.add(&ops.s[1].matmul(&ops.i[1]).scale_re(cfg.a_perp_ghz));
    Ok(h)
}

/// `V = lam_S.g_S.S + g_I lam_I.I`; the nuclear triple is optional and small
/// by the magneton ratio.
pub fn electronuclear_coupling(cfg: &ElectroNuclearConfig, lam: &CouplingVector) -> Result<OperatorMatrix> {
    cfg.validate()?;
    lam.validate()?;
    let ops = embedded_ops(cfg.s, cfg.i);
    let g = cfg.g_electron_diag();
    let mut v = OperatorMatrix::zeros(cfg.dim());
    for j in 0..3 {
        if lam.electronic[j] != 0.0 {
            v = v.add(&ops.s[j].scale_re(lam.electronic[j] * g[j]));
        }
    }
    if let Some(nuc) = lam.nuclear {
        for j in 0..3 {
            if nuc[j] != 0.0 {
                v = v.add(&ops.i[j].scale_re(cfg.g_i * nuc[j]));
            }
        }
    }
    Ok(v)
}
