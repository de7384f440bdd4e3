mod common;

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use photon_interference::experiments::{fit_fringe, phase_sweep, run_mz, Interaction, MzConfig};
use photon_interference::fock::{EnvironmentState, FockKet, ModeLabel, Path, TwoQubitState};
use photon_interference::optics::BeamSplitter;
use photon_interference::sources::ModeGrid;
use photon_interference::thermal::{g2_direct, g2_via_g1, SpatialField, CAUCHY_SCHWARZ_TOL};

use common::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn circuits_are_unitary_and_keep_states_physical(seed in any::<u64>(), len in 1usize..8) {
        let reg = path_registry();
        let mut rng = rng(seed);
        let circuit = random_circuit(&mut rng, len);
        let u = circuit_matrix(&circuit, &reg).unwrap();
        let n = u.nrows();
        prop_assert!((u.adjoint() * &u - DMatrix::<Complex64>::identity(n, n)).camax() < 1e-10);

        let rho = random_density(&mut rng, &reg, 2);
        let out = run_density(&circuit, &rho).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(out.min_eigenvalue() > -1e-10);
        prop_assert!(out.hermiticity_error() < 1e-12);
        prop_assert!((out.purity() - rho.purity()).abs() < 1e-10);
    }

    #[test]
    fn splitter_mode_matrix_is_unitary(th in 0.0..TAU, a in 0.0..TAU, b in 0.0..TAU) {
        let bs = BeamSplitter::new(
            Complex64::from_polar(th.cos(), a),
            Complex64::from_polar(th.sin(), b),
            (Path::Arm1, Path::Arm2),
            (Path::Out1, Path::Out2),
        ).unwrap();
        let m = bs.mode_matrix();
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_recovers_product_factors(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let small = |paths: [Path; 2]| photon_interference::fock::ModeRegistry::builder(1)
            .modes(paths.map(ModeLabel::photon)).build().unwrap();
        let (ra, rb) = (small([Path::Arm1, Path::Arm2]), small([Path::Out1, Path::Out2]));
        let a = FockKet::from_terms(ra.clone(), ra.basis().into_iter().zip(random_vector(&mut rng, 3))).unwrap();
        let b = FockKet::from_terms(rb.clone(), rb.basis().into_iter().zip(random_vector(&mut rng, 3))).unwrap();
        let rho = photon_interference::fock::DensityOperator::from_ket(&a.tensor(&b).unwrap());
        let back = rho.partial_trace(&[Path::Arm1, Path::Arm2].map(ModeLabel::photon)).unwrap();
        let direct = photon_interference::fock::DensityOperator::from_ket(&a);
        for s in direct.basis() {
            for t in direct.basis() {
                prop_assert!((back.element(s, t) - direct.element(s, t)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mz_visibility_is_the_environment_overlap(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = rng(seed);
        let e1 = EnvironmentState::new(random_vector(&mut rng, d), Path::Arm1).unwrap();
        let e2 = EnvironmentState::new(random_vector(&mut rng, d), Path::Arm2).unwrap();
        let gamma: Complex64 = e1.amplitudes().iter().zip(e2.amplitudes().iter()).map(|(x, y)| x.conj() * y).sum();
        let r = run_mz(&MzConfig::balanced((e1, e2), Interaction::GenericEntangler), &phase_sweep(12)).unwrap();
        prop_assert!((r.metric("visibility").unwrap() - gamma.norm()).abs() < 1e-10);
        prop_assert!(r.metric("probability_conservation_error").unwrap() < 1e-12);
    }

    #[test]
    fn concurrence_ignores_local_unitaries(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let v = random_vector(&mut rng, 4);
        let psi = TwoQubitState::from_ket([v[0], v[1], v[2], v[3]]);
        // Oracle for pure states: C = 2 |ad - bc|.
        let oracle = 2.0 * (v[0] * v[3] - v[1] * v[2]).norm();
        prop_assert!((psi.concurrence() - oracle).abs() < 1e-10);
        let (ua, ub) = (random_unitary2(&mut rng), random_unitary2(&mut rng));
        prop_assert!((psi.local_unitary(&ua, &ub).concurrence() - oracle).abs() < 1e-10);
    }

    #[test]
    fn thermal_cauchy_schwarz_and_symmetry(
        n in 2usize..=12,
        seed in any::<u64>(),
        x1 in -1e-3..1e-3f64,
        x2 in -1e-3..1e-3f64,
    ) {
        let mut rng = rng(seed);
        let phases = (0..n).map(|_| rand::Rng::random::<f64>(&mut rng) * TAU).collect();
        let field = SpatialField::plane_waves(ModeGrid::uniform(1.0e5, 1.7e4, n).unwrap()).with_phases(phases);
        let g = g2_via_g1(&field, x1, x2).unwrap();
        prop_assert!(g.g12.norm_sqr() <= g.g11 * g.g22 + CAUCHY_SCHWARZ_TOL);
        prop_assert!(g.g2 >= 0.0);
        let swapped = g2_direct(&field, x2, x1).unwrap();
        prop_assert!((g2_direct(&field, x1, x2).unwrap() - swapped).abs() < 1e-12);
    }

    #[test]
    fn fringe_fit_recovers_any_sinusoid(v in 0.0..1.0f64, phase in -PI..PI, mean in 0.1..2.0f64) {
        let phis = phase_sweep(24);
        let ys: Vec<f64> = phis.iter().map(|p| mean * (1.0 - v * (p + phase).cos())).collect();
        let f = fit_fringe(&phis, &ys).unwrap();
        prop_assert!((f.visibility() - v).abs() < 1e-12);
        prop_assert!((f.mean - mean).abs() < 1e-12);
        if v > 1e-6 {
            let dphi = (f.phase - phase + PI).rem_euclid(TAU) - PI;
            prop_assert!(dphi.abs() < 1e-9);
        }
    }
}
