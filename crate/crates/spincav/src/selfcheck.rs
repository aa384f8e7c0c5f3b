//! Invariant self-check suite behind the `selfcheck` CLI subcommand.
//!
//! Each check is a deterministic pass/fail probe of a cross-cutting
//! invariant: operator Hermiticity across all model kinds, ensemble
//! scaling equivalence, gauge invariance of |Lambda|^2, the ground-state
//! passivity bound, quadratic coupling-scaling of every second-order
//! quantity, and byte-identical CSV rendering.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::constants::{MU_B_GHZ_PER_T, MU_N_GHZ_PER_T};
use crate::dispersive::{effective_hamiltonian, qnd_commutator, EffectiveMode};
use crate::eigen::{
    diagonalize, lambda_tensor, populations, EigenSystem, Ensemble, PreparationSpec, SpectralModel,
};
use crate::error::Result;
use crate::export;
use crate::inout::{transmission_amplitude, transmission_spectrum, CavityParams};
use crate::matrix::OperatorMatrix;
use crate::model::{presets, CouplingVector, FieldVector, ModelConfig};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Tiny deterministic generator (xorshift64*), so the suite needs no RNG
/// dependency and every run sees identical samples.
struct DetRng(u64);

impl DetRng {
    fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in [-1, 1).
    fn sym(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
    }
}

fn paper_models() -> Vec<(&'static str, ModelConfig, FieldVector, CouplingVector)> {
    vec![
        (
            "toy-nv",
            ModelConfig::Toy(presets::nv_toy()),
            FieldVector::along_z(0.5 / (2.0 * MU_B_GHZ_PER_T)),
            CouplingVector::electronic(0.0096, 0.0, 0.0),
        ),
        (
            "gdw30",
            ModelConfig::GiantSpin(presets::gdw30()),
            FieldVector::scaled([1.0, 0.3, 0.3], 0.1475),
            CouplingVector::electronic(0.0, MU_B_GHZ_PER_T * 1e-10, 0.0),
        ),
        (
            "ceer",
            ModelConfig::Dimer(presets::ceer()),
            FieldVector::along_z(0.02),
            CouplingVector::electronic(MU_B_GHZ_PER_T * 1e-10, 0.0, 0.0),
        ),
        (
            "yb-trensal",
            ModelConfig::ElectroNuclear(presets::yb_trensal()),
            FieldVector::along_z(0.1),
            CouplingVector::electronic(0.02, 0.0, 0.0)
                .with_nuclear([0.02 * MU_N_GHZ_PER_T / MU_B_GHZ_PER_T, 0.0, 0.0]),
        ),
    ]
}

fn check_hermiticity() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for (_, model, field, lam) in paper_models() {
        let h = model.hamiltonian(&field)?;
        let v = model.coupling_operator(&lam)?;
        worst = worst.max(h.max_abs_dev_from_hermitian()).max(v.max_abs_dev_from_hermitian());
    }
    Ok(CheckOutcome {
        name: "hermiticity",
        passed: worst < 1e-12,
        detail: format!("max |A - A^dag| over all models = {worst:.3e}"),
    })
}

fn check_ensemble_scaling() -> Result<CheckOutcome> {
    let (_, model, field, lam) = paper_models().swap_remove(0);
    let cav = CavityParams::new(2.6899, 4e-5, 4e-5)?;
    let n = 1.6e14;
    let base =
        SpectralModel::build(&model, &field, &lam, &PreparationSpec::Pure(0), Ensemble::single(), 0.0094)?;
    let ensemble = SpectralModel::new(
        base.eigen.clone(),
        base.lambda.clone(),
        base.populations.clone(),
        Ensemble::Uniform { n },
        base.eta_ghz,
    )?;
    let scaled = SpectralModel::new(
        base.eigen.clone(),
        base.lambda.scale(n.sqrt()),
        base.populations.clone(),
        Ensemble::single(),
        base.eta_ghz,
    )?;
    let mut worst: f64 = 0.0;
    for i in 0..400 {
        let w = 2.6899 - 0.02 + i as f64 * 1e-4;
        let t1 = transmission_amplitude(w, &cav, &ensemble)?;
        let t2 = transmission_amplitude(w, &cav, &scaled)?;
        worst = worst.max((t1 - t2).norm());
    }
    Ok(CheckOutcome {
        name: "ensemble-scaling",
        passed: worst <= 1e-12,
        detail: format!("max |t(N, L) - t(1, sqrt(N) L)| = {worst:.3e}"),
    })
}

fn check_gauge_invariance() -> Result<CheckOutcome> {
    let mut rng = DetRng(0x9E3779B97F4A7C15);
    let dim = 6;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let mut h = Array2::<C64>::zeros((dim, dim));
        let mut v = Array2::<C64>::zeros((dim, dim));
        for i in 0..dim {
            h[(i, i)] = C64::new(rng.sym() * 3.0, 0.0);
            v[(i, i)] = C64::new(rng.sym(), 0.0);
            for j in (i + 1)..dim {
                let zh = C64::new(rng.sym(), rng.sym());
                let zv = C64::new(rng.sym(), rng.sym());
                h[(i, j)] = zh;
                h[(j, i)] = zh.conj();
                v[(i, j)] = zv;
                v[(j, i)] = zv.conj();
            }
        }
        let hop = OperatorMatrix::hermitian_from_array(h)?;
        let vop = OperatorMatrix::hermitian_from_array(v)?;
        let es = diagonalize(&hop)?;
        let lam = lambda_tensor(&es, &vop)?;

        let mut gauged = es.vectors().clone();
        for col in 0..dim {
            let phi = rng.sym() * std::f64::consts::PI;
            let phase = C64::new(phi.cos(), phi.sin());
            for r in 0..dim {
                gauged[(r, col)] *= phase;
            }
        }
        let es2 = EigenSystem::from_parts(es.energies().to_vec(), gauged)?;
        let lam2 = lambda_tensor(&es2, &vop)?;
        for a in 0..dim {
            for b in 0..dim {
                worst = worst.max((lam.abs_sqr(a, b) - lam2.abs_sqr(a, b)).abs());
            }
        }
    }
    Ok(CheckOutcome {
        name: "phase-gauge-invariance",
        passed: worst < 1e-12,
        detail: format!("max ||L|^2 - |L'|^2| under re-gauging = {worst:.3e}"),
    })
}

fn check_passivity() -> Result<CheckOutcome> {
    let cav = CavityParams::new(3.1, 2e-4, 3e-4)?;
    let bound = cav.bare_peak();
    let mut worst: f64 = 0.0;
    for (_, model, field, lam) in paper_models() {
        let sm =
            SpectralModel::build(&model, &field, &lam, &PreparationSpec::Pure(0), Ensemble::single(), 1e-3)?;
        let grid: Vec<f64> = (1..=500).map(|i| i as f64 * 0.02).collect();
        let trace = transmission_spectrum(&grid, &cav, &sm)?;
        for &v in &trace.abs_t {
            worst = worst.max(v);
        }
    }
    Ok(CheckOutcome {
        name: "ground-state-passivity",
        passed: worst <= bound + 1e-12,
        detail: format!("max |t_c| = {worst:.6} vs bound {bound:.6}"),
    })
}

fn check_quadratic_scaling() -> Result<CheckOutcome> {
    let cav = CavityParams::new(2.6899, 4e-5, 4e-5)?;
    let mut worst: f64 = 0.0;
    for (_, model, field, lam) in paper_models() {
        let sm =
            SpectralModel::build(&model, &field, &lam, &PreparationSpec::Pure(0), Ensemble::single(), 0.0)?;
        let half = SpectralModel::new(
            sm.eigen.clone(),
            sm.lambda.scale(0.5),
            sm.populations.clone(),
            Ensemble::single(),
            0.0,
        )?;
        let eff = effective_hamiltonian(&sm, &cav, EffectiveMode::Diagonal)?;
        let eff_half = effective_hamiltonian(&half, &cav, EffectiveMode::Diagonal)?;
        for a in 0..sm.dim() {
            let scale = eff.lamb_shift[a].abs().max(1e-300);
            worst = worst.max((eff_half.lamb_shift[a] - 0.25 * eff.lamb_shift[a]).abs() / scale);
            let scale = eff.photon_pull[a].abs().max(1e-300);
            worst = worst.max((eff_half.photon_pull[a] - 0.25 * eff.photon_pull[a]).abs() / scale);
        }
        let q = qnd_commutator(&sm, &cav)?;
        let q_half = qnd_commutator(&half, &cav)?;
        let scale = q.frobenius.max(1e-300);
        worst = worst.max((q_half.frobenius - 0.25 * q.frobenius).abs() / scale);
    }
    Ok(CheckOutcome {
        name: "quadratic-coupling-scaling",
        passed: worst < 1e-12,
        detail: format!("max relative deviation from s^2 scaling at s = 1/2: {worst:.3e}"),
    })
}

fn check_csv_determinism() -> Result<CheckOutcome> {
    let (_, model, field, lam) = paper_models().swap_remove(0);
    let cav = CavityParams::new(2.6899, 4e-5, 4e-5)?;
    let sm =
        SpectralModel::build(&model, &field, &lam, &PreparationSpec::Pure(0), Ensemble::single(), 0.0094)?;
    let render = || -> Result<String> {
        let grid: Vec<f64> = (0..=500).map(|i| 2.6879 + i as f64 * 8e-6).collect();
        let mut traces = Vec::new();
        for beta in 0..sm.dim() {
            let prepared = sm.prepared_pure(beta)?;
            traces.push((beta, transmission_spectrum(&grid, &cav, &prepared)?));
        }
        let refs: Vec<(usize, &crate::inout::TransmissionTrace)> =
            traces.iter().map(|(b, t)| (*b, t)).collect();
        let mut out = export::trace_csv(&refs);
        let p = populations(&sm.eigen, &PreparationSpec::Thermal { kelvin: 0.1 })?;
        out.push_str(&format!("# thermal check {p:?}\n"));
        Ok(out)
    };
    let first = render()?;
    let second = render()?;
    Ok(CheckOutcome {
        name: "csv-determinism",
        passed: first == second,
        detail: format!("two renders, {} bytes each, identical = {}", first.len(), first == second),
    })
}

/// Run the whole suite.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_hermiticity()?,
        check_ensemble_scaling()?,
        check_gauge_invariance()?,
        check_passivity()?,
        check_quadratic_scaling()?,
        check_csv_determinism()?,
    ])
}
