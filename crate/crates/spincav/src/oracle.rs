//! Exact diagonalization of the full spin-photon Hamiltonian on a truncated
//! Fock space; the independent oracle for dispersive shifts and effective
//! models.
//!
//! `H = H_S (x) 1 + 1 (x) Wc a^dag a + V (x) (a^dag + a)`, spin factor first,
//! with the standard truncated ladder matrices on `n = 0 ..= n_max`.

use ndarray::{linalg::kron, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::inout::CavityParams;
use crate::matrix::OperatorMatrix;

/// Squared-overlap threshold below which dressed-state labels are refused.
pub const OVERLAP_THRESHOLD: f64 = 0.7;

/// Truncated spin-photon system.
#[derive(Debug, Clone)]
pub struct FullSystem {
    pub spin_dim: usize,
    pub n_max: usize,
    pub hamiltonian: OperatorMatrix,
}

impl FullSystem {
    pub fn dim(&self) -> usize {
        self.spin_dim * (self.n_max + 1)
    }

    /// Flattened index of the bare product state `|spin r, n photons>`.
    pub fn bare_index(&self, r: usize, n: usize) -> usize {
        r * (self.n_max + 1) + n
    }
}

/// Truncated `a^dag + a` on `n = 0 ..= n_max`.
pub fn quadrature_matrix(n_max: usize) -> Array2<C64> {
    let np = n_max + 1;
    let mut x = Array2::<C64>::zeros((np, np));
    for n in 1..np {
        let v = C64::new((n as f64).sqrt(), 0.0);
        x[(n - 1, n)] = v; // a
        x[(n, n - 1)] = v; // a^dag
    }
    x
}

/// Assemble the truncated total Hamiltonian.
pub fn build_full_hamiltonian(
    h_s: &OperatorMatrix,
    v: &OperatorMatrix,
    cav: &CavityParams,
    n_max: usize,
) -> Result<FullSystem> {
    cav.validate()?;
    if n_max < 1 {
        return Err(Error::invalid("photon cutoff n_max must be >= 1"));
    }
    if h_s.dim() != v.dim() {
        return Err(Error::invalid("spin Hamiltonian and coupling dimensions differ"));
    }
    if !h_s.hermitian() || !v.hermitian() {
        return Err(Error::invalid("spin Hamiltonian and coupling must be Hermitian"));
    }
    let d = h_s.dim();
    let np = n_max + 1;
    let mut number = Array2::<C64>::zeros((np, np));
    for n in 0..np {
        number[(n, n)] = C64::new(cav.omega_ghz * n as f64, 0.0);
    }
    let id_spin = Array2::<C64>::eye(d);
    let id_ph = Array2::<C64>::eye(np);
    let mut h = kron(h_s.entries(), &id_ph);
    h += &kron(&id_spin, &number);
    h += &kron(v.entries(), &quadrature_matrix(n_max));
    Ok(FullSystem { spin_dim: d, n_max, hamiltonian: OperatorMatrix::from_array(h)? })
}

/// All eigenvalues of the full system, ascending.
pub fn sorted_eigenvalues(fs: &FullSystem) -> Result<Vec<f64>> {
    Ok(crate::eigen::diagonalize(&fs.hamiltonian)?.energies().to_vec())
}

/// Dressed level adiabatically connected to the bare product state
/// `|beta, n>`: the eigenvector maximising the squared overlap.  Fails as
/// non-dispersive when the best overlap drops below [`OVERLAP_THRESHOLD`].
fn dressed_energy(
    fs: &FullSystem,
    spin_es: &crate::eigen::EigenSystem,
    full_es: &crate::eigen::EigenSystem,
    beta: usize,
    n: usize,
) -> Result<f64> {
    let d = fs.spin_dim;
    let np = fs.n_max + 1;
    let mut best = (0usize, -1.0f64);
    for k in 0..fs.dim() {
        // overlap = sum_r conj(U_spin[r, beta]) * psi_k[r * np + n]
        let mut amp = C64::new(0.0, 0.0);
        for r in 0..d {
            amp += spin_es.component(r, beta).conj() * full_es.component(r * np + n, k);
        }
        let w = amp.norm_sqr();
        if w > best.1 {
            best = (k, w);
        }
    }
    if best.1 < OVERLAP_THRESHOLD {
        return Err(Error::NonDispersive(format!(
            "dressed-state tracking for |beta={beta}, n={n}> is ambiguous (best squared overlap {:.3})",
            best.1
        )));
    }
    Ok(full_es.energy(best.0))
}

/// Per-state cavity transition frequency from exact diagonalization:
/// `E_dressed(beta, 1) - E_dressed(beta, 0)`.
pub fn ed_cavity_frequency(
    fs: &FullSystem,
    spin_es: &crate::eigen::EigenSystem,
    beta: usize,
) -> Result<f64> {
    if beta >= fs.spin_dim {
        return Err(Error::invalid(format!("state index {beta} out of range")));
    }
    let full_es = crate::eigen::diagonalize(&fs.hamiltonian)?;
    let e0 = dressed_energy(fs, spin_es, &full_es, beta, 0)?;
    let e1 = dressed_energy(fs, spin_es, &full_es, beta, 1)?;
    Ok(e1 - e0)
}

/// One row of the photon-cutoff convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffRow {
    pub n_max: usize,
    /// Max drift of the lowest `2 d` levels relative to the previous cutoff
    /// (`None` for the first row).
    pub drift_ghz: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CutoffReport {
    pub rows: Vec<CutoffRow>,
    /// True when the final drift is below 1e-10 GHz.
    pub converged: bool,
}

/// Convergence drift threshold (GHz).
pub const CUTOFF_DRIFT_TOL_GHZ: f64 = 1e-10;

/// Track the lowest `2 d` eigenvalues across ascending cutoffs.
pub fn cutoff_report(
    h_s: &OperatorMatrix,
    v: &OperatorMatrix,
    cav: &CavityParams,
    n_max_list: &[usize],
) -> Result<CutoffReport> {
    if n_max_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("cutoff list must be strictly ascending"));
    }
    let take = 2 * h_s.dim();
    let mut rows = Vec::with_capacity(n_max_list.len());
    let mut prev: Option<Vec<f64>> = None;
    for &n_max in n_max_list {
        let fs = build_full_hamiltonian(h_s, v, cav, n_max)?;
        let evs: Vec<f64> = sorted_eigenvalues(&fs)?.into_iter().take(take).collect();
        let drift = prev.as_ref().map(|p| {
            p.iter().zip(evs.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        });
        rows.push(CutoffRow { n_max, drift_ghz: drift });
        prev = Some(evs);
    }
    let converged = rows
        .last()
        .and_then(|r| r.drift_ghz)
        .map(|d| d < CUTOFF_DRIFT_TOL_GHZ)
        .unwrap_or(false);
    Ok(CutoffReport { rows, converged })
}
