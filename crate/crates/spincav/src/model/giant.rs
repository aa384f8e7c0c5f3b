//! Giant-spin Hamiltonians: Stevens anisotropy plus Zeeman coupling.

use std::collections::BTreeMap;

use crate::constants::MU_B_GHZ_PER_T;
use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::model::spin::{spin_matrices, Spin};
use crate::model::stevens::stevens_operator;
use crate::model::{CouplingVector, FieldVector};

/// Giant-spin model: `H = sum B_k^q O_k^q + zeeman_sign * mu_B B.g.S` (GHz).
#[derive(Debug, Clone)]
pub struct GiantSpinConfig {
    pub s: Spin,
    /// Rank-2 Stevens coefficients in GHz, keyed by `(k, q)`.
    pub stevens: BTreeMap<(u32, i32), f64>,
    /// Caller-supplied Hermitian anisotropy terms (pre-scaled, GHz); the
    /// escape hatch for rank 4 and 6 operators.
    pub raw_anisotropy: Vec<OperatorMatrix>,
    /// Gyromagnetic tensor (general real 3x3).
    pub g: [[f64; 3]; 3],
    /// `+1.0` or `-1.0`; sign in front of the Zeeman term.
    pub zeeman_sign: f64,
}

impl GiantSpinConfig {
    /// Convenience constructor with a diagonal g-tensor.
    pub fn with_diag_g(s: Spin, stevens: BTreeMap<(u32, i32), f64>, g_diag: [f64; 3], zeeman_sign: f64) -> Self {
        Self {
            s,
            stevens,
            raw_anisotropy: Vec::new(),
            g: diag3(g_diag),
            zeeman_sign,
        }
    }

    /// Returns the diagonal of `g` if all off-diagonal entries vanish.
    pub fn g_diag(&self) -> Option<[f64; 3]> {
        for i in 0..3 {
            for j in 0..3 {
                if i != j && self.g[i][j] != 0.0 {
                    return None;
                }
            }
        }
        Some([self.g[0][0], self.g[1][1], self.g[2][2]])
    }

    pub fn validate(&self) -> Result<()> {
        if self.zeeman_sign != 1.0 && self.zeeman_sign != -1.0 {
            return Err(Error::invalid(format!("zeeman_sign must be +1 or -1, got {}", self.zeeman_sign)));
        }
        for row in &self.g {
            for v in row {
                if !v.is_finite() {
                    return Err(Error::invalid("g-tensor entries must be finite"));
                }
            }
        }
        for (k, v) in &self.stevens {
            if !v.is_finite() {
                return Err(Error::invalid(format!("Stevens coefficient for {k:?} must be finite")));
            }
        }
        for raw in &self.raw_anisotropy {
            if raw.dim() != self.s.dim() {
                return Err(Error::invalid(format!(
                    "raw anisotropy term has dimension {}, expected {}",
                    raw.dim(),
                    self.s.dim()
                )));
            }
            if !raw.hermitian() {
                return Err(Error::invalid("raw anisotropy terms must be Hermitian"));
            }
        }
        Ok(())
    }
}

/// `H = sum_kq B_k^q O_k^q + sum raw + zeeman_sign * mu_B sum_jk B_j g_jk S_k`.
pub fn giant_spin_hamiltonian(cfg: &GiantSpinConfig, b: &FieldVector) -> Result<OperatorMatrix> {
    cfg.validate()?;
    b.validate()?;
    let dim = cfg.s.dim();
    let mut h = OperatorMatrix::zeros(dim);
    for (&(k, q), &coeff) in &cfg.stevens {
        let op = stevens_operator(k, q, cfg.s)?;
        h = h.add(&op.scale_re(coeff));
    }
    for raw in &cfg.raw_anisotropy {
        h = h.add(raw);
    }
    h = h.add(&zeeman_term(cfg.s, &cfg.g, b, cfg.zeeman_sign * MU_B_GHZ_PER_T));
    Ok(h)
}

/// `prefactor * sum_jk B_j g_jk S_k` with `prefactor` carrying sign and magneton.
pub(crate) fn zeeman_term(s: Spin, g: &[[f64; 3]; 3], b: &FieldVector, prefactor: f64) -> OperatorMatrix {
    let ops = spin_matrices(s);
    let bvec = [b.bx, b.by, b.bz];
    let mut h = OperatorMatrix::zeros(s.dim());
    for (j, &bj) in bvec.iter().enumerate() {
        if bj == 0.0 {
            continue;
        }
        for k in 0..3 {
            let w = prefactor * bj * g[j][k];
            if w != 0.0 {
                h = h.add(&ops.axis(k).scale_re(w));
            }
        }
    }
    h
}

/// `sum_jk lam_j g_jk S_k` -- the cavity-field analogue of the Zeeman term.
pub(crate) fn field_coupling(s: Spin, g: &[[f64; 3]; 3], lam: [f64; 3]) -> OperatorMatrix {
    let ops = spin_matrices(s);
    let mut v = OperatorMatrix::zeros(s.dim());
    for (j, &lj) in lam.iter().enumerate() {
        if lj == 0.0 {
            continue;
        }
        for k in 0..3 {
            let w = lj * g[j][k];
            if w != 0.0 {
                v = v.add(&ops.axis(k).scale_re(w));
            }
        }
    }
    v
}

/// Coupling operator for the giant-spin model: `V = lam . g . S`.
pub fn giant_spin_coupling(cfg: &GiantSpinConfig, lam: &CouplingVector) -> Result<OperatorMatrix> {
    cfg.validate()?;
    lam.validate()?;
    Ok(field_coupling(cfg.s, &cfg.g, lam.electronic))
}

/// Uniaxial S = 1 model `H = D Sz^2 + mu_B B.g.S` with diagonal `g`.
///
/// The anisotropy is applied as `D Sz^2` directly (not through `O_2^0`) so
/// the `M = 0` level sits exactly at zero energy.
#[derive(Debug, Clone)]
pub struct ToyConfig {
    /// Uniaxial anisotropy `D` in GHz.
    pub d_ghz: f64,
    /// Diagonal g-tensor entries.
    pub g_diag: [f64; 3],
}

impl ToyConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.d_ghz.is_finite() {
            return Err(Error::invalid("toy model D must be finite"));
        }
        if self.g_diag.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("toy model g entries must be finite"));
        }
        Ok(())
    }

    pub fn spin(&self) -> Spin {
        Spin::from_twice(2)
    }
}

pub fn toy_hamiltonian(cfg: &ToyConfig, b: &FieldVector) -> Result<OperatorMatrix> {
    cfg.validate()?;
    b.validate()?;
    let s = cfg.spin();
    let ops = spin_matrices(s);
    let mut h = ops.sz.matmul(&ops.sz).scale_re(cfg.d_ghz);
    h = h.add(&zeeman_term(s, &diag3(cfg.g_diag), b, MU_B_GHZ_PER_T));
    Ok(h)
}

pub fn toy_coupling(cfg: &ToyConfig, lam: &CouplingVector) -> Result<OperatorMatrix> {
    cfg.validate()?;
    lam.validate()?;
    Ok(field_coupling(cfg.spin(), &diag3(cfg.g_diag), lam.electronic))
}

pub(crate) fn diag3(d: [f64; 3]) -> [[f64; 3]; 3] {
    [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]]
}
