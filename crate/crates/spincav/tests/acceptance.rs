//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).  Tolerances and
//! runtime budgets are pinned in code.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spincav::constants::{MU_B_GHZ_PER_T, MU_N_GHZ_PER_T};
use spincav::dispersive::{effective_hamiltonian, qnd_commutator, qnd_working_point_s1, EffectiveMode};
use spincav::eigen::{
    diagonalize, lambda_giant_spin_explicit, lambda_tensor, Ensemble, PreparationSpec,
    SpectralModel,
};
use spincav::inout::{
    dispersive_shift, locate_state_peak, transmission_amplitude, transmission_spectrum,
    CavityParams,
};
use spincav::model::{presets, spin_matrices, CouplingVector, FieldVector, ModelConfig, Spin};
use spincav::oracle::{build_full_hamiltonian, cutoff_report, ed_cavity_frequency};

const TOY_D: f64 = 2.87;
const TOY_OMEGA: f64 = 2.6899;
const TOY_LAMXGX: f64 = 0.0192;

struct Criterion {
    name: &'static str,
    budget: Duration,
    start: Instant,
}

impl Criterion {
    fn begin(name: &'static str, budget_s: u64) -> Self {
        Self { name, budget: Duration::from_secs(budget_s), start: Instant::now() }
    }

    fn finish(self, detail: &str) {
        let elapsed = self.start.elapsed();
        println!("PASS {} ({} ms): {detail}", self.name, elapsed.as_millis());
        assert!(
            elapsed <= self.budget,
            "{} exceeded its {}s budget ({} ms)",
            self.name,
            self.budget.as_secs(),
            elapsed.as_millis()
        );
    }
}

fn toy_sm(xi_z: f64, eta: f64, beta: usize) -> SpectralModel {
    SpectralModel::build(
        &ModelConfig::Toy(presets::nv_toy()),
        &FieldVector::along_z(xi_z / (2.0 * MU_B_GHZ_PER_T)),
        &CouplingVector::electronic(TOY_LAMXGX / 2.0, 0.0, 0.0),
        &PreparationSpec::Pure(beta),
        Ensemble::single(),
        eta,
    )
    .unwrap()
}

/// Criterion 1: the three toy-model shifts match the analytic closed forms
/// to 1e-12 relative.
#[test]
fn criterion_01_toy_analytic_shifts() {
    let c = Criterion::begin("criterion 1: toy-model analytic shifts", 1);
    let cav = CavityParams::new(TOY_OMEGA, 4e-5, 4e-5).unwrap();
    let sm = toy_sm(0.5, 0.0094, 0);
    let l2 = TOY_LAMXGX * TOY_LAMXGX;
    let w2 = TOY_OMEGA * TOY_OMEGA;
    let e_minus = sm.eigen.energy(1);
    let e_plus = sm.eigen.energy(2);
    let d_plus = l2 * e_plus / (e_plus * e_plus - w2);
    let d_minus = l2 * e_minus / (e_minus * e_minus - w2);
    let d_zero = -(d_plus + d_minus);
    // ascending eigen indices: 0 = M0, 1 = M-, 2 = M+
    let mut worst_rel: f64 = 0.0;
    for (beta, want) in [(0, d_zero), (1, d_minus), (2, d_plus)] {
        let got = dispersive_shift(&sm, &cav, beta, None).unwrap().value.re;
        worst_rel = worst_rel.max((got - want).abs() / want.abs());
    }
    assert!(worst_rel <= 1e-12, "worst relative deviation {worst_rel:e}");
    c.finish(&format!("max relative deviation {worst_rel:.3e}"));
}

/// Criterion 2: per-state |t_c| peaks land within gamma/2 + |Im shift| of
/// the predicted pull and are pairwise distinct.
#[test]
fn criterion_02_transmission_peak_consistency() {
    let c = Criterion::begin("criterion 2: transmission-peak consistency", 5);
    let cav = CavityParams::new(TOY_OMEGA, 4e-5, 4e-5).unwrap();
    let gamma = cav.gamma();
    let sm = toy_sm(0.5, 0.0094, 0);
    let mut peaks = Vec::new();
    let mut worst_dev: f64 = 0.0;
    for beta in 0..3 {
        let prepared = sm.prepared_pure(beta).unwrap();
        let shift = dispersive_shift(&prepared, &cav, beta, Some(TOY_OMEGA)).unwrap().value;
        let predicted = TOY_OMEGA + shift.re;
        let report = locate_state_peak(&sm, &cav, beta, 25.0).unwrap();
        let tol = gamma / 2.0 + shift.im.abs();
        let dev = (report.omega_peak_ghz - predicted).abs();
        assert!(dev < tol, "state {beta}: |peak - predicted| = {dev:e} >= {tol:e}");
        worst_dev = worst_dev.max(dev / tol);
        peaks.push(report.omega_peak_ghz);
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            assert!(
                (peaks[i] - peaks[j]).abs() > gamma / 2.0,
                "peaks {i} and {j} not distinct: {peaks:?}"
            );
        }
    }
    c.finish(&format!("3 distinct peaks, worst |dev|/tol = {worst_dev:.3}"));
}

/// Criterion 3: the ED dressed cavity frequency approaches Wc + shift with
/// a fitted exponent >= 2.5 as the coupling is halved twice.
#[test]
fn criterion_03_ed_oracle_agreement() {
    let c = Criterion::begin("criterion 3: ED-oracle agreement", 30);
    let cav = CavityParams::new(TOY_OMEGA, 1e-5, 1e-5).unwrap();
    let model = ModelConfig::Toy(presets::nv_toy());
    let b = FieldVector::along_z(0.5 / (2.0 * MU_B_GHZ_PER_T));
    let mut slopes = Vec::new();
    let mut residuals = vec![Vec::new(); 3];
    for scale in [1.0, 0.5, 0.25] {
        let lamxgx = scale * TOY_LAMXGX;
        let lam = CouplingVector::electronic(lamxgx / 2.0, 0.0, 0.0);
        let h = model.hamiltonian(&b).unwrap();
        let v = model.coupling_operator(&lam).unwrap();
        // convergence certificate before the oracle is used
        let report = cutoff_report(&h, &v, &cav, &[4, 6, 8]).unwrap();
        assert!(report.converged, "cutoff not converged: {:?}", report.rows);
        let fs = build_full_hamiltonian(&h, &v, &cav, 8).unwrap();
        let spin = diagonalize(&h).unwrap();
        let sm = SpectralModel::build(&model, &b, &lam, &PreparationSpec::Pure(0), Ensemble::single(), 0.0)
            .unwrap();
        for beta in 0..3 {
            let ed = ed_cavity_frequency(&fs, &spin, beta).unwrap();
            let shift = dispersive_shift(&sm, &cav, beta, None).unwrap().value.re;
            residuals[beta].push((ed - (TOY_OMEGA + shift)).abs());
        }
    }
    for beta in 0..3 {
        let r = &residuals[beta];
        let slope = 0.5 * ((r[0] / r[1]).log2() + (r[1] / r[2]).log2());
        assert!(slope >= 2.5, "state {beta}: exponent {slope} < 2.5 (residuals {r:?})");
        slopes.push(slope);
    }
    c.finish(&format!("residual exponents {slopes:.3?} (all >= 2.5)"));
}

/// Criterion 4: effective-Hamiltonian coefficients reproduce the two-level
/// closed forms to 1e-12 over 100 random dispersive parameter triples.
#[test]
fn criterion_04_qubit_limit() {
    let c = Criterion::begin("criterion 4: qubit limit", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0usize;
    let mut worst_rel: f64 = 0.0;
    while checked < 100 {
        let delta: f64 = rng.gen_range(1.0..10.0);
        let omega: f64 = rng.gen_range(1.0..10.0);
        let g: f64 = rng.gen_range(1e-4..2e-2);
        if (delta - omega).abs() <= 20.0 * g {
            continue;
        }
        let ops = spin_matrices(Spin::from_twice(1));
        let h = ops.sz.scale_re(delta);
        let es = diagonalize(&h).unwrap();
        let lambda = lambda_tensor(&es, &ops.sx.scale_re(2.0 * g)).unwrap();
        let sm = SpectralModel::new(es, lambda, vec![1.0, 0.0], Ensemble::single(), 0.0).unwrap();
        let cav = CavityParams::new(omega, 1e-5, 1e-5).unwrap();
        let eff = effective_hamiltonian(&sm, &cav, EffectiveMode::Full).unwrap();
        let blocks = eff.full.as_ref().unwrap();
        let g2 = g * g;
        let chi = 2.0 * delta * g2 / (delta * delta - omega * omega);
        let pair = delta * g2 / (delta * delta - omega * omega);
        let mut check = |got: f64, want: f64| {
            let rel = (got - want).abs() / want.abs();
            worst_rel = worst_rel.max(rel);
            assert!(rel <= 1e-12, "{got} vs {want} (rel {rel:e})");
        };
        check(eff.lamb_shift[1], g2 / (delta - omega));
        check(eff.lamb_shift[0], -g2 / (delta + omega));
        check(eff.photon_pull[1], chi);
        check(eff.photon_pull[0], -chi);
        check(blocks.raise2_block[(1, 1)].re, pair);
        check(blocks.raise2_block[(0, 0)].re, -pair);
        check(blocks.lower2_block[(1, 1)].re, pair);
        check(blocks.lower2_block[(0, 0)].re, -pair);
        checked += 1;
    }
    c.finish(&format!("100 triples, worst relative deviation {worst_rel:.3e}"));
}

/// Criterion 5: the explicit M-sum coupling tensor equals the matrix route
/// to 1e-10 over random diagonal-g models for S in {1/2, 1, 3/2, 7/2}.
#[test]
fn criterion_05_lambda_cross_check() {
    let c = Criterion::begin("criterion 5: coupling-tensor cross-check", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(515);
    let mut worst: f64 = 0.0;
    for twice in [1u32, 2, 3, 7] {
        for _ in 0..25 {
            let s = Spin::from_twice(twice);
            let mut stevens = std::collections::BTreeMap::new();
            if twice >= 2 {
                for q in [0i32, 1, 2] {
                    if rng.gen_bool(0.8) {
                        stevens.insert((2u32, q), rng.gen_range(-1.5..1.5));
                    }
                }
            }
            let g_diag =
                [rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0)];
            let cfg = spincav::model::GiantSpinConfig::with_diag_g(
                s,
                stevens,
                g_diag,
                if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            );
            let b = FieldVector::new(
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.2..0.2),
            );
            let lam = CouplingVector::electronic(
                rng.gen_range(-0.05..0.05),
                rng.gen_range(-0.05..0.05),
                rng.gen_range(-0.05..0.05),
            );
            let h = spincav::model::giant_spin_hamiltonian(&cfg, &b).unwrap();
            let es = diagonalize(&h).unwrap();
            let v = spincav::model::giant_spin_coupling(&cfg, &lam).unwrap();
            let by_matrix = lambda_tensor(&es, &v).unwrap();
            let by_formula = lambda_giant_spin_explicit(&es, s, g_diag, &lam).unwrap();
            worst = worst.max(by_matrix.max_abs_diff(&by_formula));
        }
    }
    assert!(worst < 1e-10, "worst deviation {worst:e}");
    c.finish(&format!("100 random models, worst |Delta Lambda| = {worst:.3e}"));
}

/// Criterion 6: back-action suite: closed-form toy commutator, vanishing
/// anisotropy limit, the restoring working point, and formula-vs-direct
/// agreement on all four molecule models.
#[test]
fn criterion_06_qnd_suite() {
    let c = Criterion::begin("criterion 6: QND suite", 30);
    let lam2 = TOY_LAMXGX * TOY_LAMXGX;

    // (a) toy commutator equals the closed form
    let xi = 0.5;
    let cav = CavityParams::new(TOY_OMEGA, 1e-5, 1e-5).unwrap();
    let sm = toy_sm(xi, 0.0, 0);
    let report = qnd_commutator(&sm, &cav).unwrap();
    let e_plus = sm.eigen.energy(2);
    let e_minus = sm.eigen.energy(1);
    let w2 = TOY_OMEGA * TOY_OMEGA;
    let amp =
        xi * lam2 * (e_plus / (e_plus * e_plus - w2) + e_minus / (e_minus * e_minus - w2));
    assert!((report.commutator[(2, 1)] - C64::new(amp, 0.0)).norm() <= 1e-12);
    assert!((report.commutator[(1, 2)] + C64::new(amp, 0.0)).norm() <= 1e-12);

    // (b) norm -> 0 as D -> 0 (off-resonant cavity at 2.0 GHz)
    let cav_off = CavityParams::new(2.0, 1e-5, 1e-5).unwrap();
    let mut norms = Vec::new();
    for d in [0.4, 0.2, 0.1, 0.0] {
        let cfg = spincav::model::ToyConfig { d_ghz: d, g_diag: [2.0, 2.0, 2.0] };
        let smd = SpectralModel::build(
            &ModelConfig::Toy(cfg),
            &FieldVector::along_z(0.5 / (2.0 * MU_B_GHZ_PER_T)),
            &CouplingVector::electronic(TOY_LAMXGX / 2.0, 0.0, 0.0),
            &PreparationSpec::Pure(0),
            Ensemble::single(),
            0.0,
        )
        .unwrap();
        norms.push(qnd_commutator(&smd, &cav_off).unwrap().frobenius);
    }
    assert!(norms.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-12 * lam2), "norms {norms:?}");
    assert!(norms[3] < 1e-12 * lam2, "D = 0 norm {:e}", norms[3]);

    // (c) the working point kills the commutator
    let xi_star = qnd_working_point_s1(TOY_D, TOY_OMEGA).unwrap();
    let sm_star = toy_sm(xi_star, 0.0, 0);
    let norm_star = qnd_commutator(&sm_star, &cav).unwrap().frobenius;
    assert!(norm_star < 1e-12 * lam2, "working-point norm {norm_star:e}");

    // (d) Phi formula vs direct matrix commutator on all four models
    let models: Vec<(ModelConfig, FieldVector, CouplingVector, f64)> = vec![
        (
            ModelConfig::Toy(presets::nv_toy()),
            FieldVector::along_z(0.5 / (2.0 * MU_B_GHZ_PER_T)),
            CouplingVector::electronic(0.0096, 0.0, 0.0),
            TOY_OMEGA,
        ),
        (
            ModelConfig::GiantSpin(presets::gdw30()),
            FieldVector::scaled([1.0, 0.3, 0.3], 0.1475),
            CouplingVector::electronic(0.0, 0.02, 0.0),
            5.0,
        ),
        (
            ModelConfig::Dimer(presets::ceer()),
            FieldVector::along_z(0.02),
            CouplingVector::electronic(0.02, 0.0, 0.0),
            2.45,
        ),
        (
            ModelConfig::ElectroNuclear(presets::yb_trensal()),
            FieldVector::along_z(0.1),
            CouplingVector::electronic(0.02, 0.0, 0.0)
                .with_nuclear([0.02 * MU_N_GHZ_PER_T / MU_B_GHZ_PER_T, 0.0, 0.0]),
            6.0,
        ),
    ];
    for (model, field, lam, omega) in &models {
        let smm = SpectralModel::build(model, field, lam, &PreparationSpec::Pure(0), Ensemble::single(), 0.0)
            .unwrap();
        let cavm = CavityParams::new(*omega, 1e-6, 1e-6).unwrap();
        let r = qnd_commutator(&smm, &cavm).unwrap();
        let scale = 1.0 + r.commutator.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(r.formula_vs_direct <= 1e-12 * scale, "dim {}", smm.dim());
    }
    let norms_fmt: Vec<String> = norms.iter().map(|n| format!("{n:.2e}")).collect();
    c.finish(&format!(
        "closed form ok, D->0 norms {norms_fmt:?}, working point norm {norm_star:.2e}, 4 models consistent"
    ));
}

/// Criterion 7: the eight single-ion-magnet peaks are pairwise separated by
/// more than the full line width; broadening to 0.1 GHz suppresses every
/// peak by at least a factor 5.
#[test]
fn criterion_07_gdw30_scenario() {
    let c = Criterion::begin("criterion 7: GdW30 scenario", 60);
    let model = ModelConfig::GiantSpin(presets::gdw30());
    let field = FieldVector::scaled([1.0, 0.3, 0.3], 0.1475);
    let lam = CouplingVector::electronic(0.0, MU_B_GHZ_PER_T * 1e-10, 0.0);
    let cav = CavityParams::new(5.0, 1e-6, 1e-6).unwrap();
    let n = Ensemble::Uniform { n: 1.6e14 };

    let narrow =
        SpectralModel::build(&model, &field, &lam, &PreparationSpec::Pure(0), n.clone(), 1e-4).unwrap();
    let mut reports = Vec::new();
    for beta in 0..8 {
        reports.push(locate_state_peak(&narrow, &cav, beta, 25.0).unwrap());
    }
    let mut min_margin = f64::INFINITY;
    for i in 0..8 {
        for j in (i + 1)..8 {
            let sep = (reports[i].omega_peak_ghz - reports[j].omega_peak_ghz).abs();
            let need = reports[i].width_ghz.max(reports[j].width_ghz);
            assert!(sep > need, "peaks {i},{j}: separation {sep:e} <= width {need:e}");
            min_margin = min_margin.min(sep / need);
        }
    }

    // broadened case: per-state maximum over the full displayed range
    let broad =
        SpectralModel::build(&model, &field, &lam, &PreparationSpec::Pure(0), n, 0.1).unwrap();
    let grid: Vec<f64> = (0..=8000).map(|i| 4.98 + i as f64 * (0.04 / 8000.0)).collect();
    let mut min_drop = f64::INFINITY;
    for beta in 0..8 {
        let prepared = broad.prepared_pure(beta).unwrap();
        let trace = transmission_spectrum(&grid, &cav, &prepared).unwrap();
        let broad_max = trace.abs_t.iter().cloned().fold(0.0, f64::max);
        let drop = reports[beta].height / broad_max;
        assert!(drop >= 5.0, "state {beta}: height drop {drop} < 5");
        min_drop = min_drop.min(drop);
    }
    c.finish(&format!(
        "8 peaks, min separation/width = {min_margin:.1}, min broadening drop x{min_drop:.1}"
    ));
}

/// Criterion 8: the four dimer states give pairwise-distinct single-frequency
/// transmission magnitudes at the readout field.
#[test]
fn criterion_08_ceer_single_frequency() {
    let c = Criterion::begin("criterion 8: CeEr single-frequency readout", 30);
    let model = ModelConfig::Dimer(presets::ceer());
    let cav = CavityParams::new(2.45, 1e-4, 1e-4).unwrap();
    let sm = SpectralModel::build(
        &model,
        &FieldVector::along_z(0.02),
        &CouplingVector::electronic(MU_B_GHZ_PER_T * 1e-10, 0.0, 0.0),
        &PreparationSpec::Pure(0),
        Ensemble::Uniform { n: 2.7e14 },
        1e-4,
    )
    .unwrap();
    let values: Vec<f64> = (0..4)
        .map(|beta| {
            transmission_amplitude(2.45, &cav, &sm.prepared_pure(beta).unwrap()).unwrap().norm()
        })
        .collect();
    let mut min_gap = f64::INFINITY;
    for i in 0..4 {
        assert!(values[i] > 0.0);
        for j in (i + 1)..4 {
            let gap = (values[i] - values[j]).abs();
            assert!(gap > 1e-3, "states {i},{j}: |t| gap {gap:e} <= 1e-3");
            min_gap = min_gap.min(gap);
        }
    }
    c.finish(&format!("|t_c| = {values:.4?}, min pairwise gap {min_gap:.4}"));
}

/// Criterion 9: the two logical-qubit states of the electronuclear molecule
/// produce peaks separated by more than both line widths.
#[test]
fn criterion_09_yb_trensal_logical_qubit() {
    let c = Criterion::begin("criterion 9: electronuclear logical-qubit readout", 60);
    let model = ModelConfig::ElectroNuclear(presets::yb_trensal());
    let field = FieldVector::along_z(0.1);
    let lam = CouplingVector::electronic(0.02, 0.0, 0.0)
        .with_nuclear([0.02 * MU_N_GHZ_PER_T / MU_B_GHZ_PER_T, 0.0, 0.0]);
    let cav = CavityParams::new(6.0, 1e-6, 1e-6).unwrap();
    let sm = SpectralModel::build(&model, &field, &lam, &PreparationSpec::Pure(0), Ensemble::single(), 0.012)
        .unwrap();

    // logical states |mS = -1/2, mI = -3/2> and |mS = -1/2, mI = +3/2>:
    // electron index 1, nuclear indices 4 and 1 in the descending-M bases
    let (state1, w1) = sm.eigen.max_overlap_state(6 + 4);
    let (state4, w4) = sm.eigen.max_overlap_state(6 + 1);
    assert!(w1 > 0.9 && w4 > 0.9, "logical labels ambiguous: overlaps {w1}, {w4}");
    assert_ne!(state1, state4);

    let p1 = locate_state_peak(&sm, &cav, state1, 25.0).unwrap();
    let p4 = locate_state_peak(&sm, &cav, state4, 25.0).unwrap();
    let sep = (p1.omega_peak_ghz - p4.omega_peak_ghz).abs();
    assert!(
        sep > p1.width_ghz && sep > p4.width_ghz,
        "separation {sep:e} vs widths {:e}, {:e}",
        p1.width_ghz,
        p4.width_ghz
    );
    c.finish(&format!(
        "separation {sep:.3e} GHz vs widths {:.2e} / {:.2e} GHz",
        p1.width_ghz, p4.width_ghz
    ));
}

/// Criterion 10: the invariant suite passes in one run.
#[test]
fn criterion_10_invariant_suite() {
    let c = Criterion::begin("criterion 10: invariant suite", 120);
    let outcomes = spincav::selfcheck::run_all().unwrap();
    for o in &outcomes {
        assert!(o.passed, "{}: {}", o.name, o.detail);
    }
    let names: Vec<&str> = outcomes.iter().map(|o| o.name).collect();
    assert_eq!(outcomes.len(), 6);
    c.finish(&format!("all green: {names:?}"));
}
