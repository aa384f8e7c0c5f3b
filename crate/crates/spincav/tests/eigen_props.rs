//! Eigendecomposition contracts: ordering, gauge fixing, coupling-tensor
//! equivalence between the matrix route and the explicit M-sum, and
//! population preparation.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spincav::constants::{K_B_GHZ_PER_K, MU_B_GHZ_PER_T};
use spincav::eigen::{
    diagonalize, lambda_giant_spin_explicit, lambda_tensor, populations, EigenSystem,
    PreparationSpec,
};
use spincav::matrix::{adjoint, OperatorMatrix};
use spincav::model::{presets, spin_matrices, CouplingVector, FieldVector, ModelConfig, Spin};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> OperatorMatrix {
    let mut a = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        a[(i, i)] = c(rng.gen_range(-2.0..2.0), 0.0);
        for j in (i + 1)..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    OperatorMatrix::hermitian_from_array(a).unwrap()
}

#[test]
fn diagonal_matrix_sorts_to_permutation() {
    let mut a = Array2::<C64>::zeros((3, 3));
    a[(0, 0)] = c(3.0, 0.0);
    a[(1, 1)] = c(1.0, 0.0);
    a[(2, 2)] = c(2.0, 0.0);
    let es = diagonalize(&OperatorMatrix::hermitian_from_array(a).unwrap()).unwrap();
    assert_eq!(es.energies(), &[1.0, 2.0, 3.0]);
    // eigenvectors are basis vectors with the +1 on rows 1, 2, 0
    for (col, row) in [(0usize, 1usize), (1, 2), (2, 0)] {
        assert!((es.component(row, col) - c(1.0, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn toy_energies_match_closed_form() {
    let cfg = presets::nv_toy();
    let bz = 0.5 / (2.0 * MU_B_GHZ_PER_T);
    let h = spincav::model::toy_hamiltonian(&cfg, &FieldVector::along_z(bz)).unwrap();
    let es = diagonalize(&h).unwrap();
    assert!((es.energy(0) - 0.0).abs() < 1e-12);
    assert!((es.energy(1) - 2.37).abs() < 1e-12);
    assert!((es.energy(2) - 3.37).abs() < 1e-12);
}

#[test]
fn random_roundtrip_and_gauge_convention() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let h = random_hermitian(&mut rng, 8);
        let es = diagonalize(&h).unwrap();
        let u = es.vectors();

        // unitarity
        let gram = adjoint(u).dot(u);
        let mut dev: f64 = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                dev = dev.max((gram[(i, j)] - expect).norm());
            }
        }
        assert!(dev < 1e-10, "unitarity deviation {dev:e}");

        // reconstruction
        let mut d = Array2::<C64>::zeros((8, 8));
        for i in 0..8 {
            d[(i, i)] = c(es.energy(i), 0.0);
        }
        let rec = u.dot(&d).dot(&adjoint(u));
        let resid = (&rec - h.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(resid < 1e-10 * h.frobenius_norm().max(1.0), "residual {resid:e}");

        // energies ascend
        assert!(es.energies().windows(2).all(|w| w[0] <= w[1]));

        // gauge: largest-magnitude entry per column is real non-negative
        for col in 0..8 {
            let mut best = 0;
            for r in 1..8 {
                if es.component(r, col).norm() > es.component(best, col).norm() {
                    best = r;
                }
            }
            let z = es.component(best, col);
            assert!(z.im.abs() < 1e-12 && z.re >= 0.0, "column {col} pivot {z}");
        }
    }
}

#[test]
fn rejects_non_hermitian_input() {
    let mut a = Array2::<C64>::zeros((2, 2));
    a[(0, 1)] = c(1.0, 0.0);
    let m = OperatorMatrix::from_array(a).unwrap();
    assert!(diagonalize(&m).is_err());
}

#[test]
fn lambda_identity_coupling_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_hermitian(&mut rng, 5);
    let es = diagonalize(&h).unwrap();
    let lam = lambda_tensor(&es, &OperatorMatrix::identity(5)).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((lam.get(i, j) - c(expect, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn toy_lambda_matrix_elements() {
    let cfg = presets::nv_toy();
    let bz = 0.5 / (2.0 * MU_B_GHZ_PER_T);
    let model = ModelConfig::Toy(cfg);
    let h = model.hamiltonian(&FieldVector::along_z(bz)).unwrap();
    let es = diagonalize(&h).unwrap();
    let lamxg = 0.0192;
    let v = model.coupling_operator(&CouplingVector::electronic(lamxg / 2.0, 0.0, 0.0)).unwrap();
    let lam = lambda_tensor(&es, &v).unwrap();
    // eigenstates ascend: index 0 = M0, 1 = M-, 2 = M+
    let want = lamxg / 2f64.sqrt();
    assert!((lam.get(0, 1).norm() - want).abs() < 1e-12);
    assert!((lam.get(0, 2).norm() - want).abs() < 1e-12);
    assert!(lam.get(1, 2).norm() < 1e-12, "M+ <-> M- element must vanish");
    assert!(lam.get(0, 0).norm() < 1e-12);
}

#[test]
fn spin_half_explicit_single_gamma_term() {
    let s = Spin::from_twice(1);
    let ops = spin_matrices(s);
    // H = mu_B g bz Sz, diagonal already
    let h = ops.sz.scale_re(2.0 * MU_B_GHZ_PER_T * 0.01);
    let es = diagonalize(&h).unwrap();
    let lamx = 0.01;
    let lam = lambda_giant_spin_explicit(&es, s, [2.0, 2.0, 2.0], &CouplingVector::electronic(lamx, 0.0, 0.0))
        .unwrap();
    // off-diagonal lx gx / 2
    assert!((lam.get(0, 1).norm() - lamx * 2.0 / 2.0).abs() < 1e-14);
    assert!(lam.get(0, 0).norm() < 1e-14);
}

#[test]
fn explicit_lambda_equals_matrix_route_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for twice in [1u32, 2, 3, 7] {
        for _ in 0..8 {
            let s = Spin::from_twice(twice);
            let mut stevens = std::collections::BTreeMap::new();
            if twice >= 2 {
                stevens.insert((2, 0), rng.gen_range(-1.5..1.5));
                stevens.insert((2, 2), rng.gen_range(-0.5..0.5));
            }
            let g_diag = [rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0)];
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
            let lamv = CouplingVector::electronic(
                rng.gen_range(-0.05..0.05),
                rng.gen_range(-0.05..0.05),
                rng.gen_range(-0.05..0.05),
            );
            let h = spincav::model::giant_spin_hamiltonian(&cfg, &b).unwrap();
            let es = diagonalize(&h).unwrap();
            let v = spincav::model::giant_spin_coupling(&cfg, &lamv).unwrap();
            let by_matrix = lambda_tensor(&es, &v).unwrap();
            let by_formula = lambda_giant_spin_explicit(&es, s, g_diag, &lamv).unwrap();
            let dev = by_matrix.max_abs_diff(&by_formula);
            assert!(dev < 1e-10, "2s = {twice}: routes deviate by {dev:e}");
        }
    }
}

#[test]
fn explicit_lambda_refuses_non_diagonal_g() {
    let mut cfg = presets::gdw30();
    cfg.g[0][2] = 0.3;
    cfg.g[2][0] = 0.3;
    let h = spincav::model::giant_spin_hamiltonian(&cfg, &FieldVector::along_z(0.05)).unwrap();
    let es = diagonalize(&h).unwrap();
    let r = spincav::eigen::lambda_giant_spin_explicit_for(
        &es,
        &cfg,
        &CouplingVector::electronic(0.01, 0.0, 0.0),
    );
    assert!(matches!(r, Err(spincav::Error::Unsupported(_))));
    // the matrix route still works
    let v = spincav::model::giant_spin_coupling(&cfg, &CouplingVector::electronic(0.01, 0.0, 0.0))
        .unwrap();
    assert!(lambda_tensor(&es, &v).is_ok());
}

#[test]
fn gdw30_explicit_lambda_cross_check_at_readout_field() {
    let cfg = presets::gdw30();
    let b = FieldVector::scaled([1.0, 0.3, 0.3], 0.1475);
    let h = spincav::model::giant_spin_hamiltonian(&cfg, &b).unwrap();
    let es = diagonalize(&h).unwrap();
    let lamv = CouplingVector::electronic(1.3996245e-9, 0.0, 0.0);
    let v = spincav::model::giant_spin_coupling(&cfg, &lamv).unwrap();
    let by_matrix = lambda_tensor(&es, &v).unwrap();
    let by_formula =
        lambda_giant_spin_explicit(&es, Spin::from_twice(7), [2.0, 2.0, 2.0], &lamv).unwrap();
    assert!(by_matrix.max_abs_diff(&by_formula) < 1e-10);
}

/// Multiplying eigenvector columns by unit phases must leave every
/// |Lambda_ab|^2 unchanged.
#[test]
fn lambda_abs_sqr_is_gauge_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = random_hermitian(&mut rng, 6);
    let es = diagonalize(&h).unwrap();
    let v = random_hermitian(&mut rng, 6);
    let lam = lambda_tensor(&es, &v).unwrap();

    let mut gauged = es.vectors().clone();
    for col in 0..6 {
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let phase = c(phi.cos(), phi.sin());
        for r in 0..6 {
            gauged[(r, col)] *= phase;
        }
    }
    let es2 = EigenSystem::from_parts(es.energies().to_vec(), gauged).unwrap();
    let lam2 = lambda_tensor(&es2, &v).unwrap();
    for a in 0..6 {
        for b in 0..6 {
            assert!((lam.abs_sqr(a, b) - lam2.abs_sqr(a, b)).abs() < 1e-12);
        }
    }
}

/// For a Kramers-degenerate pair, the |Lambda|^2 sum over the pair is
/// invariant under arbitrary unitary remixing of the two columns.
#[test]
fn degenerate_pair_sums_are_basis_independent()
{
    let cfg = presets::gdw30();
    let h = spincav::model::giant_spin_hamiltonian(&cfg, &FieldVector::zero()).unwrap();
    let es = diagonalize(&h).unwrap();
    let pairs = es.degenerate_pairs();
    assert!(pairs.contains(&(0, 1)), "expected Kramers doublet at the bottom: {pairs:?}");
    let v = spincav::model::giant_spin_coupling(&cfg, &CouplingVector::electronic(1.0, 0.5, 0.25)).unwrap();
    let lam = lambda_tensor(&es, &v).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        // random SU(2) remix of columns 0, 1
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let chi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let th: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let (a11, a12) = (c(phi.cos(), phi.sin()) * th.cos(), c(chi.cos(), chi.sin()) * th.sin());
        let (a21, a22) = (-a12.conj(), a11.conj());
        let mut mixed = es.vectors().clone();
        for r in 0..8 {
            let v0 = es.component(r, 0);
            let v1 = es.component(r, 1);
            mixed[(r, 0)] = a11 * v0 + a21 * v1;
            mixed[(r, 1)] = a12 * v0 + a22 * v1;
        }
        let es2 = EigenSystem::from_parts(es.energies().to_vec(), mixed).unwrap();
        let lam2 = lambda_tensor(&es2, &v).unwrap();
        // sum over the degenerate pair for transitions into every level
        for target in 2..8 {
            let s1: f64 = lam.abs_sqr(0, target) + lam.abs_sqr(1, target);
            let s2: f64 = lam2.abs_sqr(0, target) + lam2.abs_sqr(1, target);
            assert!((s1 - s2).abs() < 1e-12 * (1.0 + s1.abs()));
        }
    }
}

#[test]
fn population_preparations() {
    let cfg = presets::nv_toy();
    let bz = 0.5 / (2.0 * MU_B_GHZ_PER_T);
    let h = spincav::model::toy_hamiltonian(&cfg, &FieldVector::along_z(bz)).unwrap();
    let es = diagonalize(&h).unwrap();

    let p = populations(&es, &PreparationSpec::Pure(0)).unwrap();
    assert_eq!(p, vec![1.0, 0.0, 0.0]);

    // effectively infinite temperature: uniform
    let p = populations(&es, &PreparationSpec::Thermal { kelvin: 1e9 }).unwrap();
    for w in &p {
        assert!((w - 1.0 / 3.0).abs() < 1e-9);
    }

    // k_B T = 1 GHz exactly: weights proportional to (1, e^-2.37, e^-3.37)
    let t = 1.0 / K_B_GHZ_PER_K;
    let p = populations(&es, &PreparationSpec::Thermal { kelvin: t }).unwrap();
    let raw = [1.0, (-2.37f64).exp(), (-3.37f64).exp()];
    let z: f64 = raw.iter().sum();
    for (got, want) in p.iter().zip(raw.iter().map(|w| w / z)) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let p = populations(&es, &PreparationSpec::Explicit(vec![2.0, 0.0, 2.0])).unwrap();
    assert_eq!(p, vec![0.5, 0.0, 0.5]);

    assert!(populations(&es, &PreparationSpec::Explicit(vec![1.0, -0.1, 0.0])).is_err());
    assert!(populations(&es, &PreparationSpec::Explicit(vec![0.0, 0.0, 0.0])).is_err());
    assert!(populations(&es, &PreparationSpec::Explicit(vec![1.0])).is_err());
    assert!(populations(&es, &PreparationSpec::Pure(3)).is_err());
    assert!(populations(&es, &PreparationSpec::Thermal { kelvin: 0.0 }).is_err());
}
