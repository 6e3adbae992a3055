//! Closed forms and reduced sums against the dense simulator.

use dicke_core::bell::{mabk_correlator_sum, mabk_normalized};
use dicke_core::oracle::{
    apply_amplitude_damping, bell_from_tensor, build_dicke, joint_probabilities, lhv_extremes,
    trace_out, DensityMatrix,
};
use dicke_core::{
    ansatz_angles, hardy_value, hardy_value_mixture, mabk_closed_vacuum, mabk_closed_w,
    mabk_value_mixture, symmetric_correlator, AnsatzFamily, DickeLabel, DickeMixture, EvalOptions,
    InequalityKind, MeasurementPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

fn rho(n: usize, k: usize) -> DensityMatrix {
    DensityMatrix::from_pure(&build_dicke(n, k).unwrap())
}

fn random_angles(rng: &mut ChaCha8Rng) -> MeasurementPair {
    MeasurementPair::new(rng.random_range(-PI..PI), rng.random_range(-PI..PI)).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

#[test]
fn bell_values_match_brute_force_up_to_eight_parties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let opts = EvalOptions::default();
    let mut worst = (0.0f64, 0.0f64);
    for n in 2..=8 {
        for _ in 0..50 {
            let a = random_angles(&mut rng);
            for k in 0..=n {
                let t = joint_probabilities(&rho(n, k), &a).unwrap();
                let hardy = hardy_value(n, k, &a).unwrap();
                let hardy_ref = bell_from_tensor(&t, InequalityKind::Hardy);
                let mabk = mabk_normalized(n, k, &a, &opts).unwrap().value * 2f64.powi(n as i32);
                let mabk_ref = bell_from_tensor(&t, InequalityKind::Mabk);
                assert!(
                    close(hardy, hardy_ref, 1e-9),
                    "Hardy n={n} k={k} {a}: {hardy} vs {hardy_ref}"
                );
                assert!(
                    close(mabk, mabk_ref, 1e-9),
                    "MABK n={n} k={k} {a}: {mabk} vs {mabk_ref}"
                );
                worst.0 = worst.0.max((hardy - hardy_ref).abs());
                worst.1 = worst
                    .1
                    .max((mabk - mabk_ref).abs() / mabk_ref.abs().max(1.0));
            }
        }
    }
    eprintln!(
        "max deviation: Hardy {:.2e}, MABK (relative) {:.2e}",
        worst.0, worst.1
    );
}

#[test]
fn correlators_match_brute_force_and_depend_on_weight_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=6 {
        let a = random_angles(&mut rng);
        for k in 0..=n {
            let t = joint_probabilities(&rho(n, k), &a).unwrap();
            for x_bits in 0..1usize << n {
                let x = x_bits.count_ones() as usize;
                let e = symmetric_correlator(n, k, x, &a).unwrap();
                assert!(
                    (e - t.correlator(x_bits)).abs() < 1e-10,
                    "n={n} k={k} x={x_bits:b}"
                );
            }
        }
    }
    // The worked cases: |4,1> with setting 0 along Z, and |6,3> with all
    // parties on setting 1.
    let z = MeasurementPair::new(0.0, 1.234).unwrap();
    let t = joint_probabilities(&rho(4, 1), &z).unwrap();
    assert!((symmetric_correlator(4, 1, 0, &z).unwrap() - t.correlator(0)).abs() < 1e-10);
    assert!((t.correlator(0) + 1.0).abs() < 1e-12);
    let g = MeasurementPair::new(0.7, -2.0).unwrap();
    let t = joint_probabilities(&rho(6, 3), &g).unwrap();
    assert!((symmetric_correlator(6, 3, 6, &g).unwrap() - t.correlator(0b111111)).abs() < 1e-10);
}

#[test]
fn reduced_mabk_sum_equals_full_input_sum_up_to_ten_parties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = EvalOptions::default();
    for n in [9usize, 10] {
        let a = random_angles(&mut rng);
        for k in [0, 1, n / 2] {
            let t = joint_probabilities(&rho(n, k), &a).unwrap();
            let full = bell_from_tensor(&t, InequalityKind::Mabk);
            let scale = 2f64.powi(n as i32);
            let reduced = mabk_normalized(n, k, &a, &opts).unwrap().value * scale;
            let pure = DickeMixture::new(n, [(k, 1.0)]).unwrap();
            let by_correlators = mabk_correlator_sum(&pure, &a, &opts).unwrap().value * scale;
            assert!(
                close(reduced, full, 1e-9),
                "n={n} k={k}: {reduced} vs {full}"
            );
            assert!(
                close(by_correlators, full, 1e-9),
                "n={n} k={k}: {by_correlators} vs {full}"
            );
        }
    }
}

#[test]
fn worked_bell_examples_against_the_oracle() {
    // Hardy on |6,2> at the k = 2 ansatz.
    let a = ansatz_angles(AnsatzFamily::HardyK2, 6).unwrap();
    let t = joint_probabilities(&rho(6, 2), &a).unwrap();
    assert!(
        (hardy_value(6, 2, &a).unwrap() - bell_from_tensor(&t, InequalityKind::Hardy)).abs()
            < 1e-10
    );

    // Hardy on a three-component mixture.
    let mix = DickeMixture::new(4, [(2, 0.25), (1, 0.5), (0, 0.25)]).unwrap();
    let a = ansatz_angles(AnsatzFamily::HardyK2, 4).unwrap();
    let t = joint_probabilities(&DensityMatrix::from_mixture(&mix).unwrap(), &a).unwrap();
    let v = hardy_value_mixture(&mix, &a).unwrap().value;
    assert!((v - bell_from_tensor(&t, InequalityKind::Hardy)).abs() < 1e-10);

    // MABK on |3,1> at the ansatz: violated, and all three routes agree.
    let a = ansatz_angles(AnsatzFamily::MabkW, 3).unwrap();
    let w3 = DickeMixture::new(3, [(1, 1.0)]).unwrap();
    let v = mabk_value_mixture(&w3, &a).unwrap();
    assert!(v.violated, "{v:?}");
    let t = joint_probabilities(&rho(3, 1), &a).unwrap();
    assert!((v.value - bell_from_tensor(&t, InequalityKind::Mabk)).abs() < 1e-9);
    let closed = mabk_closed_w(3, &a).unwrap() * 2f64.powi(2);
    assert!((v.value - closed).abs() < 1e-9 * v.value.abs());

    // Vacuum closed form at (0, pi/2) for two parties.
    let a = MeasurementPair::new(0.0, FRAC_PI_2).unwrap();
    let t = joint_probabilities(&rho(2, 0), &a).unwrap();
    let closed = mabk_closed_vacuum(2, &a).unwrap() * 2f64.powf(1.5);
    assert!((closed - bell_from_tensor(&t, InequalityKind::Mabk)).abs() < 1e-10);

    // W closed form at the n = 3 mod 4 ansatz for seven parties.
    let a = ansatz_angles(AnsatzFamily::MabkW, 7).unwrap();
    let w7 = DickeMixture::new(7, [(1, 1.0)]).unwrap();
    let sum = mabk_correlator_sum(&w7, &a, &EvalOptions::default())
        .unwrap()
        .value;
    let closed = mabk_closed_w(7, &a).unwrap() * 2f64.powi(-3);
    assert!((sum - closed).abs() < 1e-9 * sum.abs());
}

#[test]
fn particle_loss_matches_partial_trace() {
    for n in 2..=8 {
        for k in 0..=n {
            let full = rho(n, k);
            for m in 0..n {
                let reduced = trace_out(&full, m).unwrap();
                let model = DickeMixture::new(n, [(k, 1.0)])
                    .unwrap()
                    .particle_loss(m)
                    .unwrap();
                let expected = DensityMatrix::from_mixture(&model).unwrap();
                let dev = reduced.max_abs_diff(&expected);
                assert!(dev < 1e-10, "n={n} k={k} m={m}: {dev:e}");
            }
        }
    }
}

#[test]
fn hypergeometric_weights_for_six_three() {
    let reduced = trace_out(&rho(6, 3), 2).unwrap();
    let w = reduced.dicke_weights().unwrap();
    // C(4,l) C(2,3-l) / C(6,3)
    let expected = [0.0, 4.0 / 20.0, 12.0 / 20.0, 4.0 / 20.0, 0.0];
    for (l, e) in expected.iter().enumerate() {
        assert!((w[l] - e).abs() < 1e-10, "l={l}: {} vs {e}", w[l]);
    }
}

#[test]
fn w_state_damping_is_exactly_the_binomial_model() {
    for n in 2..=6 {
        for p in [0.05, 0.3, 0.77] {
            let out = apply_amplitude_damping(&rho(n, 1), p).unwrap();
            let model = DickeMixture::new(n, [(1, 1.0)])
                .unwrap()
                .excitation_loss(p)
                .unwrap();
            let expected = DensityMatrix::from_mixture(&model).unwrap();
            assert!(out.max_abs_diff(&expected) < 1e-12, "n={n} p={p}");
            assert!((out.trace().re - 1.0).abs() < 1e-12);
            out.validate().unwrap();
        }
    }
    let p0 = apply_amplitude_damping(&rho(5, 2), 0.0).unwrap();
    assert_eq!(p0, rho(5, 2));
}

#[test]
fn damping_of_two_excitations_leaves_dicke_mixtures() {
    // Per-mode damping of |4,2> populates |0>_L (x) |4-|L|, 2-|L|>, which is
    // not Dicke-diagonal. This records how far it is from the binomial model.
    let out = apply_amplitude_damping(&rho(4, 2), 0.3).unwrap();
    out.validate().unwrap();
    let projection = out.dicke_projection().unwrap();
    let model = DickeMixture::new(4, [(2, 1.0)])
        .unwrap()
        .excitation_loss(0.3)
        .unwrap();
    let discrepancy: f64 = (0..=4)
        .map(|l| (projection.weights[l] - model.weight(l)).abs())
        .sum();
    eprintln!(
        "|4,2> at p = 0.3: Dicke populations {:?}, off-mixture residual {:.3e}, L1 distance to binomial model {:.3e}",
        projection.weights, projection.residual, discrepancy
    );
    let total: f64 = projection.weights.iter().sum();
    assert!(total <= 1.0 + 1e-12);
}

#[test]
fn joint_probabilities_are_permutation_symmetric() {
    let mix = DickeMixture::new(5, [(1, 0.3), (2, 0.5), (4, 0.2)]).unwrap();
    let a = MeasurementPair::new(0.4, -2.3).unwrap();
    let t = joint_probabilities(&DensityMatrix::from_mixture(&mix).unwrap(), &a).unwrap();
    t.validate().unwrap();
    for perm in [[1, 0, 2, 3, 4], [4, 3, 2, 1, 0], [2, 3, 4, 0, 1]] {
        let p = t.permuted(&perm);
        for x in 0..32 {
            for o in 0..32 {
                assert!((p.get(x, o) - t.get(x, o)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn deterministic_strategies_respect_the_local_bounds() {
    for n in 1..=4 {
        let e = lhv_extremes(n).unwrap();
        assert!(e.max_hardy <= 0.0, "n={n}: {}", e.max_hardy);
        assert!(
            e.max_abs_mabk <= 2f64.powi(n as i32),
            "n={n}: {}",
            e.max_abs_mabk
        );
    }
}

#[test]
fn pure_label_round_trip() {
    let label = DickeLabel::new(4, 2).unwrap();
    let mix = dicke_core::make_pure(label);
    let d = DensityMatrix::from_mixture(&mix).unwrap();
    assert_eq!(d.max_abs_diff(&rho(4, 2)), 0.0);
}
