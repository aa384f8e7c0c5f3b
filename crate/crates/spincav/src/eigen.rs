//! Deterministic Hermitian eigendecomposition, eigenbasis coupling tensors
//! and state populations.
//!
//! Ordering and gauge are pinned so outputs are diffable: energies ascend,
//! and each eigenvector column is rephased so its largest-magnitude entry is
//! real and non-negative.  Nothing downstream may depend on the remaining
//! freedom inside degenerate subspaces; only gauge-invariant quantities
//! (|Lambda|^2 sums and the like) are exposed.

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::constants::K_B_GHZ_PER_K;
use crate::error::{Error, Result};
use crate::matrix::{adjoint, max_abs_dev_from_hermitian, OperatorMatrix};
use crate::model::spin::{ladder_coeff, Spin};
use crate::model::CouplingVector;

/// Energy gap below which two levels are reported as degenerate (GHz).
pub const DEGENERACY_TOL_GHZ: f64 = 1e-9;

/// Eigenbasis of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    energies: Vec<f64>,
    /// Columns are eigenvectors in the model basis, gauge-fixed.
    vectors: Array2<C64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, alpha: usize) -> f64 {
        self.energies[alpha]
    }

    /// Transition energy `E(a) - E(b)`.
    pub fn gap(&self, a: usize, b: usize) -> f64 {
        self.energies[a] - self.energies[b]
    }

    pub fn vectors(&self) -> &Array2<C64> {
        &self.vectors
    }

    /// Component of eigenstate `alpha` on model-basis state `r`.
    pub fn component(&self, r: usize, alpha: usize) -> C64 {
        self.vectors[(r, alpha)]
    }

    /// Pairs `(i, j)`, `i < j`, with `|E_i - E_j| <` [`DEGENERACY_TOL_GHZ`].
    pub fn degenerate_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                if (self.energies[i] - self.energies[j]).abs() < DEGENERACY_TOL_GHZ {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// Index of the eigenstate with the largest overlap on model-basis state
    /// `r`, together with the squared overlap.
    pub fn max_overlap_state(&self, r: usize) -> (usize, f64) {
        let mut best = (0, -1.0);
        for alpha in 0..self.dim() {
            let w = self.vectors[(r, alpha)].norm_sqr();
            if w > best.1 {
                best = (alpha, w);
            }
        }
        best
    }

    /// Assemble from parts (energies ascending, square vector matrix).
    /// Useful for re-gauging studies; no unitarity check is performed.
    pub fn from_parts(energies: Vec<f64>, vectors: Array2<C64>) -> Result<Self> {
        if vectors.nrows() != vectors.ncols() || vectors.nrows() != energies.len() {
            return Err(Error::invalid("eigen system parts have inconsistent dimensions"));
        }
        if energies.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("energies must be ascending"));
        }
        Ok(Self { energies, vectors })
    }
}

/// Diagonalize a Hermitian operator with the fixed ordering and gauge.
pub fn diagonalize(h: &OperatorMatrix) -> Result<EigenSystem> {
    if !h.hermitian() {
        return Err(Error::invalid(format!(
            "diagonalize requires a Hermitian operator (max |A - A^dag| = {:e})",
            h.max_abs_dev_from_hermitian()
        )));
    }
    let n = h.dim();
    let a = DMatrix::<C64>::from_fn(n, n, |i, j| h.entries()[(i, j)]);
    let se = a.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));

    let mut energies = Vec::with_capacity(n);
    let mut vectors = Array2::<C64>::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        energies.push(se.eigenvalues[src]);
        // gauge: largest-magnitude entry real and non-negative
        let mut best_row = 0;
        let mut best_mag = -1.0;
        for r in 0..n {
            let mag = se.eigenvectors[(r, src)].norm();
            if mag > best_mag {
                best_mag = mag;
                best_row = r;
            }
        }
        let pivot = se.eigenvectors[(best_row, src)];
        let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
        for r in 0..n {
            vectors[(r, col)] = se.eigenvectors[(r, src)] * phase;
        }
    }
    Ok(EigenSystem { energies, vectors })
}

/// Coupling tensor in the eigenbasis.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    entries: Array2<C64>,
}

impl CouplingMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.entries[(a, b)]
    }

    /// `|Lambda_(a,b)|^2 = Lambda_(a,b) Lambda_(b,a)`, gauge invariant.
    pub fn abs_sqr(&self, a: usize, b: usize) -> f64 {
        (self.entries[(a, b)] * self.entries[(b, a)]).re
    }

    pub fn sum_abs_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { entries: self.entries.mapv(|z| z * factor) }
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        (&self.entries - &rhs.entries).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn from_entries(entries: Array2<C64>) -> Result<Self> {
        if max_abs_dev_from_hermitian(&entries) >= 1e-12 {
            return Err(Error::invalid("coupling matrix must be Hermitian"));
        }
        Ok(Self { entries })
    }
}

/// `Lambda = U^dag V U`: the coupling operator rotated into the eigenbasis.
pub fn lambda_tensor(es: &EigenSystem, v: &OperatorMatrix) -> Result<CouplingMatrix> {
    if v.dim() != es.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: eigensystem {} vs operator {}",
            es.dim(),
            v.dim()
        )));
    }
    if !v.hermitian() {
        return Err(Error::invalid("coupling operator must be Hermitian"));
    }
    let u = es.vectors();
    let entries = adjoint(u).dot(v.entries()).dot(u);
    Ok(CouplingMatrix { entries })
}

/// Coupling tensor from the explicit M-sum valid for a single spin with a
/// diagonal g-tensor:
///
/// ```text
/// Lambda_(a1,a2) = lz gz sum_M M c(a1,M) c*(a2,M)
///                + sum_M gamma_SM (lx gx - i ly gy)/2 c(a1,M+1) c*(a2,M)
///                + sum_M gamma_SM (lx gx + i ly gy)/2 c(a1,M) c*(a2,M+1)
/// ```
///
/// with `gamma_SM = sqrt(s(s+1) - M(M+1))` and `c(a,M)` the eigenvector
/// component on `|s,M>`.
pub fn lambda_giant_spin_explicit(
    es: &EigenSystem,
    s: Spin,
    g_diag: [f64; 3],
    lam: &CouplingVector,
) -> Result<CouplingMatrix> {
    lam.validate()?;
    if es.dim() != s.dim() {
        return Err(Error::invalid(format!(
            "eigensystem dimension {} does not match spin dimension {}",
            es.dim(),
            s.dim()
        )));
    }
    let dim = s.dim();
    let [lx, ly, lz] = lam.electronic;
    let [gx, gy, gz] = g_diag;
    let plus_coeff = C64::new(lx * gx, -ly * gy) * 0.5; // multiplies c(a1,M+1) c*(a2,M)
    let minus_coeff = C64::new(lx * gx, ly * gy) * 0.5; // multiplies c(a1,M) c*(a2,M+1)

    // c(a, M) = <a|M> is the conjugate of the stored eigenvector component
    // <M|a>; projection M sits at row r = s - M.
    let c = |r: usize, a: usize| es.component(r, a).conj();

    let mut entries = Array2::<C64>::zeros((dim, dim));
    for a1 in 0..dim {
        for a2 in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..dim {
                let m = s.projection(r);
                acc += C64::new(lz * gz * m, 0.0) * c(r, a1) * c(r, a2).conj();
                // ladder terms connect M (row r) and M+1 (row r-1)
                if r > 0 {
                    let gamma = ladder_coeff(s, m);
                    acc += plus_coeff * gamma * c(r - 1, a1) * c(r, a2).conj();
                    acc += minus_coeff * gamma * c(r, a1) * c(r - 1, a2).conj();
                }
            }
            entries[(a1, a2)] = acc;
        }
    }
    Ok(CouplingMatrix { entries })
}

/// As [`lambda_giant_spin_explicit`], reading the diagonal off a giant-spin
/// config; a g-tensor with off-diagonal entries is unsupported here (use
/// [`lambda_tensor`] instead).
pub fn lambda_giant_spin_explicit_for(
    es: &EigenSystem,
    cfg: &crate::model::GiantSpinConfig,
    lam: &CouplingVector,
) -> Result<CouplingMatrix> {
    let g_diag = cfg.g_diag().ok_or_else(|| {
        Error::Unsupported("explicit coupling formula requires a diagonal g-tensor; use lambda_tensor".into())
    })?;
    lambda_giant_spin_explicit(es, cfg.s, g_diag, lam)
}

/// How the diagonal density matrix over eigenstates is prepared.
#[derive(Debug, Clone, PartialEq)]
pub enum PreparationSpec {
    /// All weight on one eigenstate (by ascending-energy index).
    Pure(usize),
    /// Boltzmann weights at temperature `kelvin`.
    Thermal { kelvin: f64 },
    /// Explicit non-negative weights, normalized internally.
    Explicit(Vec<f64>),
}

/// Populations `p_alpha` over eigenstates, summing to one.
pub fn populations(es: &EigenSystem, spec: &PreparationSpec) -> Result<Vec<f64>> {
    let dim = es.dim();
    match spec {
        PreparationSpec::Pure(beta) => {
            if *beta >= dim {
                return Err(Error::invalid(format!("state index {beta} out of range (dim {dim})")));
            }
            let mut p = vec![0.0; dim];
            p[*beta] = 1.0;
            Ok(p)
        }
        PreparationSpec::Thermal { kelvin } => {
            if !kelvin.is_finite() || *kelvin <= 0.0 {
                return Err(Error::invalid(format!("temperature must be positive, got {kelvin}")));
            }
            let beta_inv = K_B_GHZ_PER_K * kelvin; // GHz
            let e0 = es.energies().iter().cloned().fold(f64::INFINITY, f64::min);
            let weights: Vec<f64> =
                es.energies().iter().map(|e| (-(e - e0) / beta_inv).exp()).collect();
            let z: f64 = weights.iter().sum();
            Ok(weights.into_iter().map(|w| w / z).collect())
        }
        PreparationSpec::Explicit(weights) => {
            if weights.len() != dim {
                return Err(Error::invalid(format!(
                    "explicit weights length {} does not match dimension {dim}",
                    weights.len()
                )));
            }
            if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(Error::invalid("explicit weights must be finite and non-negative"));
            }
            let z: f64 = weights.iter().sum();
            if z <= 0.0 {
                return Err(Error::invalid("explicit weights must not sum to zero"));
            }
            Ok(weights.iter().map(|w| w / z).collect())
        }
    }
}

/// Ensemble description: `N` identical molecules, or explicit per-molecule
/// coupling scale factors (summed as `sum_i scale_i^2` since the coupling
/// enters all observables quadratically).
#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    Uniform { n: f64 },
    Scaled(Vec<f64>),
}

impl Ensemble {
    pub fn single() -> Self {
        Ensemble::Uniform { n: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Ensemble::Uniform { n } => {
                if !n.is_finite() || *n < 1.0 {
                    return Err(Error::invalid(format!("ensemble multiplicity must be >= 1, got {n}")));
                }
            }
            Ensemble::Scaled(scales) => {
                if scales.is_empty() || scales.iter().any(|s| !s.is_finite()) {
                    return Err(Error::invalid("ensemble scale factors must be finite and non-empty"));
                }
            }
        }
        Ok(())
    }

    /// The factor multiplying `|Lambda|^2` sums.
    pub fn factor(&self) -> f64 {
        match self {
            Ensemble::Uniform { n } => *n,
            Ensemble::Scaled(scales) => scales.iter().map(|s| s * s).sum(),
        }
    }
}

/// Everything the input-output and effective-Hamiltonian layers need:
/// eigenbasis energies, coupling tensor, populations, ensemble factor and
/// spectral broadening.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub eigen: EigenSystem,
    pub lambda: CouplingMatrix,
    pub populations: Vec<f64>,
    pub ensemble: Ensemble,
    /// Spin-level broadening `eta` in GHz.
    pub eta_ghz: f64,
}

impl SpectralModel {
    pub fn new(
        eigen: EigenSystem,
        lambda: CouplingMatrix,
        populations: Vec<f64>,
        ensemble: Ensemble,
        eta_ghz: f64,
    ) -> Result<Self> {
        if lambda.dim() != eigen.dim() || populations.len() != eigen.dim() {
            return Err(Error::invalid("spectral model dimensions are inconsistent"));
        }
        if !eta_ghz.is_finite() || eta_ghz < 0.0 {
            return Err(Error::invalid(format!("eta must be >= 0, got {eta_ghz}")));
        }
        ensemble.validate()?;
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("populations must sum to 1, got {total}")));
        }
        Ok(Self { eigen, lambda, populations, ensemble, eta_ghz })
    }

    /// Build from a model + field + coupling + preparation.
    pub fn build(
        model: &crate::model::ModelConfig,
        b: &crate::model::FieldVector,
        lam: &CouplingVector,
        prep: &PreparationSpec,
        ensemble: Ensemble,
        eta_ghz: f64,
    ) -> Result<Self> {
        let h = model.hamiltonian(b)?;
        let eigen = diagonalize(&h)?;
        let v = model.coupling_operator(lam)?;
        let lambda = lambda_tensor(&eigen, &v)?;
        let populations = populations(&eigen, prep)?;
        Self::new(eigen, lambda, populations, ensemble, eta_ghz)
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// Same model re-prepared in a pure state.
    pub fn prepared_pure(&self, beta: usize) -> Result<Self> {
        let populations = populations(&self.eigen, &PreparationSpec::Pure(beta))?;
        Ok(Self { populations, ..self.clone() })
    }
}
