use std::f64::consts::PI;

use esdlab_core::adiabatic::{adiabatic_concurrence, AdiabaticParams};
use esdlab_core::markov::{evolve_state, CoherenceModel, QuantumNoiseParams, QubitNoise};
use esdlab_core::qmath::{
    hermitian_eigenvalues, kron, trace, wootters_concurrence, DensityMatrix4, Mat2, Mat4, C64, ZERO,
};
use esdlab_core::states::{ewl_state, xstate_concurrence, EwlParams, Flavor};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// ρ = G G† / tr(G G†) for a random complex 4×4 G.
fn density() -> impl Strategy<Value = DensityMatrix4> {
    prop::collection::vec(complex(), 16).prop_map(|g| {
        let mut m: Mat4 = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = (0..4).map(|k| g[4 * i + k] * g[4 * j + k].conj()).sum();
            }
        }
        let tr = trace(&m).re;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v /= tr;
            }
        }
        DensityMatrix4::new(m).unwrap()
    })
}

fn unitary2() -> impl Strategy<Value = Mat2> {
    (0.0..2.0 * PI, 0.0..2.0 * PI, 0.0..2.0 * PI, 0.0..PI / 2.0).prop_map(|(a, b, c, d)| {
        let (s, co) = d.sin_cos();
        [
            [C64::from_polar(co, a), C64::from_polar(s, b)],
            [-C64::from_polar(s, c - b), C64::from_polar(co, c - a)],
        ]
    })
}

fn flavor() -> impl Strategy<Value = Flavor> {
    prop_oneof![Just(Flavor::Phi), Just(Flavor::Psi)]
}

fn ewl() -> impl Strategy<Value = EwlParams> {
    (0.0..=1.0f64, 0.0..=1.0f64, flavor(), 0.0..2.0 * PI)
        .prop_map(|(r, a2, f, phase)| EwlParams::from_a2(r, a2, f).unwrap().with_b_phase(phase))
}

fn is_physical(rho: &DensityMatrix4) -> bool {
    let eig = hermitian_eigenvalues(rho.elements()).unwrap();
    (trace(rho.elements()).re - 1.0).abs() < 1e-12 && eig.iter().all(|&e| e > -1e-10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn concurrence_invariant_under_local_unitaries(rho in density(), ua in unitary2(), ub in unitary2()) {
        let rotated = rho.evolve(&kron(&ua, &ub)).unwrap();
        let (c0, c1) = (wootters_concurrence(&rho), wootters_concurrence(&rotated));
        prop_assert!((0.0..=1.0).contains(&c0));
        prop_assert!((c0 - c1).abs() < 1e-9, "{c0} vs {c1}");
    }

    #[test]
    fn ewl_states_are_physical(p in ewl()) {
        let rho = ewl_state(&p).unwrap();
        prop_assert!(is_physical(&rho));
        prop_assert!((xstate_concurrence(&rho).unwrap() - wootters_concurrence(&rho)).abs() < 1e-9);
        prop_assert!((wootters_concurrence(&rho) - p.initial_concurrence()).abs() < 1e-12);
    }

    #[test]
    fn composed_channel_stays_physical(
        p in ewl(),
        omega_t in 0.0..2e5f64,
        theta in 0.0..PI,
        detuning in 0.8..1.2f64,
        temperature in 0.01..1.0f64,
    ) {
        let omega = 1e11;
        let ad = AdiabaticParams::new(omega, theta, 0.02 * omega, 1.0, 1e6).unwrap();
        let q = QuantumNoiseParams::new(2e6, temperature).unwrap();
        let qa = QubitNoise::new(ad, q);
        let qb = QubitNoise::new(ad.with_omega(detuning * omega), q);
        let rho0 = ewl_state(&p).unwrap();
        for model in [CoherenceModel::Factorized, CoherenceModel::CrossTerm] {
            let out = evolve_state(omega_t / omega, &rho0, &qa, &qb, model).unwrap();
            prop_assert!(is_physical(&out));
            let c = xstate_concurrence(&out).unwrap();
            prop_assert!((c - wootters_concurrence(&out)).abs() < 1e-9);
            prop_assert!(c <= wootters_concurrence(&rho0) + 1e-12);
        }
    }

    #[test]
    fn adiabatic_concurrence_bounded_and_non_increasing(
        p in ewl(),
        theta in 0.0..PI,
        t1 in 0.0..1e5f64,
        dt in 0.0..1e5f64,
    ) {
        let omega = 1e11;
        let ad = AdiabaticParams::new(omega, theta, 0.02 * omega, 1.0, 1e6).unwrap();
        let c1 = adiabatic_concurrence(t1 / omega, &ad, &ad, &p).unwrap();
        let c2 = adiabatic_concurrence((t1 + dt) / omega, &ad, &ad, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&c1));
        prop_assert!(c2 <= c1 + 1e-15);
    }
}

#[test]
fn random_x_states_match_oracle() {
    // 10⁴ X states from the X-form entries of random density matrices.
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = density();
    for _ in 0..10_000 {
        let full = strategy.new_tree(&mut runner).unwrap().current();
        let mut x: Mat4 = [[ZERO; 4]; 4];
        for i in 0..4 {
            x[i][i] = full.get(i, i);
            x[i][3 - i] = full.get(i, 3 - i);
        }
        // the X part of a positive matrix is itself positive
        let rho = DensityMatrix4::new(x).unwrap();
        let diff = (xstate_concurrence(&rho).unwrap() - wootters_concurrence(&rho)).abs();
        assert!(diff < 1e-9, "{diff}");
    }
}
