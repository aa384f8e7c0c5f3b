//! Second-order effective Hamiltonians and back-action diagnostics.
//!
//! The block-diagonalizing generator is `S = sum_(b1,b2) (G+ a^dag + G- a) X^(b1,b2)`
//! with `G+- = L_(b1,b2) / (E_(b1,b2) +- Wc)`.  Carrying out `H0 + [S, H_I]/2`
//! gives four coefficient blocks over eigenstate pairs:
//!
//! ```text
//! static:  1/2 sum_a L_(b1,a) L_(a,b2) ( 1/(E_(b1,a) - Wc) + 1/(E_(b2,a) - Wc) )
//! a^dag a:     sum_a L_(b1,a) L_(a,b2) ( E_(b1,a)/(E_(b1,a)^2 - Wc^2)
//!                                      + E_(b2,a)/(E_(b2,a)^2 - Wc^2) )
//! (a^dag)^2: 1/2 sum_a L_(b1,a) L_(a,b2) ( 1/(E_(b1,a) + Wc) + 1/(E_(b2,a) - Wc) )
//! a^2:       1/2 sum_a L_(b1,a) L_(a,b2) ( 1/(E_(b1,a) - Wc) + 1/(E_(b2,a) + Wc) )
//! ```
//!
//! The diagonal of the `a^dag a` block is the per-state photon pull and must
//! agree with the input-output dispersive shift; the full `a^dag a` block is
//! the effective spin-photon interaction whose commutator with the spin
//! Hamiltonian measures the deviation from a non-demolition readout.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::eigen::SpectralModel;
use crate::error::{Error, Result};
use crate::inout::CavityParams;
use crate::matrix::OperatorMatrix;

/// A transition within this distance of `+-Wc` (GHz) counts as resonant.
pub const RESONANT_TOL_GHZ: f64 = 1e-9;

/// A pair excluded from the transformation because its denominator is resonant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantPair {
    pub a: usize,
    pub b: usize,
    /// '+' for `E + Wc`, '-' for `E - Wc`.
    pub sign: char,
    pub gap_ghz: f64,
}

/// Generator tables `G+- = L / (E +- Wc)` over ordered pairs.
#[derive(Debug, Clone)]
pub struct SWGenerator {
    pub gamma_plus: Array2<C64>,
    pub gamma_minus: Array2<C64>,
    /// Pairs excluded (entries zeroed) because `|E +- Wc|` fell inside tolerance.
    pub flagged: Vec<ResonantPair>,
}

impl SWGenerator {
    pub fn dim(&self) -> usize {
        self.gamma_plus.nrows()
    }
}

/// Build the generator, excluding resonant pairs with a flag.
pub fn sw_generator(sm: &SpectralModel, cav: &CavityParams) -> Result<SWGenerator> {
    cav.validate()?;
    let dim = sm.dim();
    let omega = cav.omega_ghz;
    let mut gamma_plus = Array2::<C64>::zeros((dim, dim));
    let mut gamma_minus = Array2::<C64>::zeros((dim, dim));
    let mut flagged = Vec::new();
    for b1 in 0..dim {
        for b2 in 0..dim {
            let l = sm.lambda.get(b1, b2);
            let e = sm.eigen.gap(b1, b2);
            let dp = e + omega;
            let dm = e - omega;
            if dp.abs() <= RESONANT_TOL_GHZ {
                flagged.push(ResonantPair { a: b1, b: b2, sign: '+', gap_ghz: dp.abs() });
            } else {
                gamma_plus[(b1, b2)] = l / dp;
            }
            if dm.abs() <= RESONANT_TOL_GHZ {
                flagged.push(ResonantPair { a: b1, b: b2, sign: '-', gap_ghz: dm.abs() });
            } else {
                gamma_minus[(b1, b2)] = l / dm;
            }
        }
    }
    Ok(SWGenerator { gamma_plus, gamma_minus, flagged })
}

/// As [`sw_generator`], but a resonant pair with non-zero coupling is a hard
/// error naming the pair.
pub fn sw_generator_strict(sm: &SpectralModel, cav: &CavityParams) -> Result<SWGenerator> {
    let gen = sw_generator(sm, cav)?;
    for pair in &gen.flagged {
        if sm.lambda.get(pair.a, pair.b).norm() > 0.0 {
            return Err(Error::ResonantDenominator {
                a: pair.a,
                b: pair.b,
                sign: pair.sign,
                gap: pair.gap_ghz,
            });
        }
    }
    Ok(gen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectiveMode {
    Diagonal,
    Full,
}

/// Off-diagonal coefficient blocks of the full second-order Hamiltonian.
///
/// Stored as spin-sector coefficient tensors, independent of any photon
/// cutoff; [`EffectiveModel::reconstruct_truncated`] applies a cutoff.
#[derive(Debug, Clone)]
pub struct FullBlocks {
    /// Photon-independent block (contains the Lamb shifts on its diagonal).
    pub static_block: Array2<C64>,
    /// `a^dag a` block (contains the photon pulls on its diagonal).
    pub number_block: Array2<C64>,
    /// `(a^dag)^2` block.
    pub raise2_block: Array2<C64>,
    /// `a^2` block (adjoint of the raise block).
    pub lower2_block: Array2<C64>,
}

/// Second-order effective model in the spin eigenbasis.
#[derive(Debug, Clone)]
pub struct EffectiveModel {
    pub energies: Vec<f64>,
    pub omega_ghz: f64,
    /// Per-state Lamb shift `eps_a = sum_b |L_ab|^2 / (E_ab - Wc)` (GHz).
    pub lamb_shift: Vec<f64>,
    /// Per-state photon pull `chi_a = sum_b 2 |L_ab|^2 E_ab / (E_ab^2 - Wc^2)` (GHz).
    pub photon_pull: Vec<f64>,
    pub full: Option<FullBlocks>,
    pub flagged: Vec<ResonantPair>,
}

/// Build the effective model; `Full` mode also assembles the off-diagonal
/// coefficient blocks.  Ensemble factor and broadening play no role here:
/// the transformation is a single-molecule statement.
pub fn effective_hamiltonian(
    sm: &SpectralModel,
    cav: &CavityParams,
    mode: EffectiveMode,
) -> Result<EffectiveModel> {
    let gen = sw_generator(sm, cav)?;
    let dim = sm.dim();
    let omega = cav.omega_ghz;
    let resonant = |e: f64| (e - omega).abs() <= RESONANT_TOL_GHZ || (e + omega).abs() <= RESONANT_TOL_GHZ;

    let mut lamb_shift = vec![0.0; dim];
    let mut photon_pull = vec![0.0; dim];
    for a in 0..dim {
        for b in 0..dim {
            let l2 = sm.lambda.abs_sqr(a, b);
            if l2 == 0.0 {
                continue;
            }
            let e = sm.eigen.gap(a, b);
            if resonant(e) {
                continue; // excluded pair, already flagged by the generator
            }
            lamb_shift[a] += l2 / (e - omega);
            photon_pull[a] += 2.0 * l2 * e / (e * e - omega * omega);
        }
    }

    let full = match mode {
        EffectiveMode::Diagonal => None,
        EffectiveMode::Full => {
            let mut static_block = Array2::<C64>::zeros((dim, dim));
            let mut number_block = Array2::<C64>::zeros((dim, dim));
            let mut raise2_block = Array2::<C64>::zeros((dim, dim));
            let mut lower2_block = Array2::<C64>::zeros((dim, dim));
            for b1 in 0..dim {
                for b2 in 0..dim {
                    let mut st = C64::new(0.0, 0.0);
                    let mut nb = C64::new(0.0, 0.0);
                    let mut r2 = C64::new(0.0, 0.0);
                    let mut l2 = C64::new(0.0, 0.0);
                    for a in 0..dim {
                        let ll = sm.lambda.get(b1, a) * sm.lambda.get(a, b2);
                        if ll.norm_sqr() == 0.0 {
                            continue;
                        }
                        let e1 = sm.eigen.gap(b1, a);
                        let e2 = sm.eigen.gap(b2, a);
                        if resonant(e1) || resonant(e2) {
                            continue;
                        }
                        st += ll * 0.5 * (1.0 / (e1 - omega) + 1.0 / (e2 - omega));
                        nb += ll
                            * (e1 / (e1 * e1 - omega * omega) + e2 / (e2 * e2 - omega * omega));
                        r2 += ll * 0.5 * (1.0 / (e1 + omega) + 1.0 / (e2 - omega));
                        l2 += ll * 0.5 * (1.0 / (e1 - omega) + 1.0 / (e2 + omega));
                    }
                    static_block[(b1, b2)] = st;
                    number_block[(b1, b2)] = nb;
                    raise2_block[(b1, b2)] = r2;
                    lower2_block[(b1, b2)] = l2;
                }
            }
            Some(FullBlocks { static_block, number_block, raise2_block, lower2_block })
        }
    };

    Ok(EffectiveModel {
        energies: sm.eigen.energies().to_vec(),
        omega_ghz: omega,
        lamb_shift,
        photon_pull,
        full,
        flagged: gen.flagged,
    })
}

impl EffectiveModel {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Eigenvalues of the diagonal effective model on a photon truncation:
    /// `E_a + eps_a + n (Wc + chi_a)` for `n = 0 ..= n_max`, ascending.
    pub fn diagonal_levels(&self, n_max: usize) -> Vec<f64> {
        let mut levels = Vec::with_capacity(self.dim() * (n_max + 1));
        for a in 0..self.dim() {
            for n in 0..=n_max {
                levels.push(self.energies[a] + self.lamb_shift[a] + n as f64 * (self.omega_ghz + self.photon_pull[a]));
            }
        }
        levels.sort_by(f64::total_cmp);
        levels
    }

    /// Reconstruct the full effective operator on a photon truncation
    /// `n = 0 ..= n_max` (spin factor first).
    pub fn reconstruct_truncated(&self, n_max: usize) -> Result<OperatorMatrix> {
        let blocks = self
            .full
            .as_ref()
            .ok_or_else(|| Error::invalid("reconstruction requires full mode"))?;
        let dim = self.dim();
        let np = n_max + 1;

        let mut spin_static = Array2::<C64>::zeros((dim, dim));
        for a in 0..dim {
            spin_static[(a, a)] = C64::new(self.energies[a], 0.0);
        }
        spin_static += &blocks.static_block;

        let mut photon_number = Array2::<C64>::zeros((np, np));
        let mut raise2 = Array2::<C64>::zeros((np, np));
        for n in 0..np {
            photon_number[(n, n)] = C64::new(n as f64, 0.0);
            // (a^dag)^2 |n> = sqrt((n+1)(n+2)) |n+2>
            if n + 2 < np {
                raise2[(n + 2, n)] = C64::new(((n + 1) as f64 * (n + 2) as f64).sqrt(), 0.0);
            }
        }
        let lower2 = crate::matrix::adjoint(&raise2);
        let id_ph = Array2::<C64>::eye(np);

        use ndarray::linalg::kron;
        let mut h = kron(&spin_static, &id_ph);
        // a^dag a carries the bare cavity frequency plus the pull block
        let mut number_spin = blocks.number_block.clone();
        for a in 0..dim {
            number_spin[(a, a)] += C64::new(self.omega_ghz, 0.0);
        }
        h += &kron(&number_spin, &photon_number);
        h += &kron(&blocks.raise2_block, &raise2);
        h += &kron(&blocks.lower2_block, &lower2);
        OperatorMatrix::from_array(h)
    }
}

/// Back-action report: the commutator of the spin Hamiltonian with the
/// effective spin-photon interaction.
#[derive(Debug, Clone)]
pub struct QNDReport {
    /// `Phi` tensor: the `a^dag a` coefficient block.
    pub phi: Array2<C64>,
    /// `[H_S, V~]` built entrywise as `E_(b1,b2) Phi_(b1,b2)`.
    pub commutator: Array2<C64>,
    /// Frobenius norm of the commutator (GHz^2 scale).
    pub frobenius: f64,
    /// Frobenius norm divided by `sum |L|^2` (coupling-scale-free).
    pub normalized: f64,
    /// Max entry difference between the Phi formula and the direct matrix
    /// commutator (consistency certificate, must be tiny).
    pub formula_vs_direct: f64,
}

/// Compute the QND-violation commutator both from the `Phi` formula and as a
/// direct matrix commutator, certifying they agree to 1e-12.
pub fn qnd_commutator(sm: &SpectralModel, cav: &CavityParams) -> Result<QNDReport> {
    let eff = effective_hamiltonian(sm, cav, EffectiveMode::Full)?;
    let blocks = eff.full.as_ref().expect("full mode requested");
    let dim = eff.dim();

    let phi = blocks.number_block.clone();
    let mut commutator = Array2::<C64>::zeros((dim, dim));
    for b1 in 0..dim {
        for b2 in 0..dim {
            let e = sm.eigen.gap(b1, b2);
            commutator[(b1, b2)] = C64::new(e, 0.0) * phi[(b1, b2)];
        }
    }

    // direct route: [diag(E), Phi] via actual matrix products
    let mut h_s = Array2::<C64>::zeros((dim, dim));
    for a in 0..dim {
        h_s[(a, a)] = C64::new(sm.eigen.energy(a), 0.0);
    }
    let direct = h_s.dot(&phi) - phi.dot(&h_s);
    let formula_vs_direct = (&commutator - &direct).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = 1.0 + commutator.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if formula_vs_direct > 1e-12 * scale {
        return Err(Error::Internal(format!(
            "Phi-formula commutator deviates from direct matrix commutator by {formula_vs_direct:e}"
        )));
    }

    let frobenius = commutator.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let lambda_scale = sm.lambda.sum_abs_sqr();
    let normalized = if lambda_scale > 0.0 { frobenius / lambda_scale } else { 0.0 };
    Ok(QNDReport { phi, commutator, frobenius, normalized, formula_vs_direct })
}

/// Longitudinal working point restoring the non-demolition character of the
/// uniaxial S = 1 readout: `xi_z = sqrt(D^2 - Wc^2)`, requiring `D > Wc`.
pub fn qnd_working_point_s1(d_ghz: f64, omega_ghz: f64) -> Result<f64> {
    if !(d_ghz.is_finite() && omega_ghz.is_finite()) {
        return Err(Error::invalid("working point inputs must be finite"));
    }
    if d_ghz < omega_ghz {
        return Err(Error::NoRealWorkingPoint { d: d_ghz, omega: omega_ghz });
    }
    Ok((d_ghz * d_ghz - omega_ghz * omega_ghz).sqrt())
}

/// One field point of the effective-model / exact-diagonalization comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwEdPoint {
    pub field_t: f64,
    /// Max |effective - exact| over the lowest `2 d` sorted levels (GHz).
    pub max_discrepancy_ghz: f64,
    /// False when some pair violated the dispersive guard `|L| < ||E| - Wc|`.
    pub dispersive: bool,
}

/// Sweep the field and compare the diagonal effective levels against exact
/// diagonalization on the photon-truncated space.
pub fn sw_vs_ed_compare(
    model: &crate::model::ModelConfig,
    lam: &crate::model::CouplingVector,
    cav: &CavityParams,
    direction: [f64; 3],
    field_grid: &[f64],
    n_max: usize,
) -> Result<Vec<SwEdPoint>> {
    let dim = model.dim();
    let mut out = Vec::with_capacity(field_grid.len());
    for &b in field_grid {
        let field = crate::model::FieldVector::scaled(direction, b);
        let sm = SpectralModel::build(
            model,
            &field,
            lam,
            &crate::eigen::PreparationSpec::Pure(0),
            crate::eigen::Ensemble::single(),
            0.0,
        )?;
        let eff = effective_hamiltonian(&sm, cav, EffectiveMode::Diagonal)?;
        let eff_levels = eff.diagonal_levels(n_max);

        let h_s = model.hamiltonian(&field)?;
        let v = model.coupling_operator(lam)?;
        let fs = crate::oracle::build_full_hamiltonian(&h_s, &v, cav, n_max)?;
        let exact = crate::oracle::sorted_eigenvalues(&fs)?;

        let take = 2 * dim;
        let max_disc = eff_levels
            .iter()
            .zip(exact.iter())
            .take(take)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);

        let mut dispersive = true;
        'guard: for a in 0..dim {
            for bb in 0..dim {
                if a == bb {
                    continue;
                }
                let l = sm.lambda.abs_sqr(a, bb).sqrt();
                if l > 0.0 && l >= (sm.eigen.gap(a, bb).abs() - cav.omega_ghz).abs() {
                    dispersive = false;
                    break 'guard;
                }
            }
        }
        out.push(SwEdPoint { field_t: b, max_discrepancy_ghz: max_disc, dispersive });
    }
    Ok(out)
}
