use dicke_core::{
    hardy_value, hardy_value_mixture, make_pure, symmetric_correlator, DickeLabel, DickeMixture,
    MeasurementPair,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn pure(n: usize, k: usize) -> DickeMixture {
    make_pure(DickeLabel::new(n, k).unwrap())
}

fn label() -> impl Strategy<Value = (usize, usize)> {
    (1usize..60).prop_flat_map(|n| (Just(n), 0..=n))
}

fn assert_same_weights(a: &DickeMixture, b: &DickeMixture, tol: f64) {
    assert_eq!(a.n(), b.n());
    for l in 0..=a.n() {
        assert!(
            (a.weight(l) - b.weight(l)).abs() <= tol,
            "l={l}: {} vs {}",
            a.weight(l),
            b.weight(l)
        );
    }
}

proptest! {
    #[test]
    fn loss_outputs_are_normalized((n, k) in label(), p in 0.0f64..=1.0, m_frac in 0.0f64..1.0) {
        let s = pure(n, k);
        let total: f64 = s.excitation_loss(p).unwrap().iter().map(|(_, w)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let m = ((n as f64 - 1.0) * m_frac) as usize;
        let total: f64 = s.particle_loss(m).unwrap().iter().map(|(_, w)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn excitation_loss_composes_multiplicatively((n, k) in label(), p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
        let s = pure(n, k);
        let twice = s.excitation_loss(p1).unwrap().excitation_loss(p2).unwrap();
        let once = s.excitation_loss(1.0 - (1.0 - p1) * (1.0 - p2)).unwrap();
        assert_same_weights(&twice, &once, 1e-12);
    }

    #[test]
    fn particle_loss_composes_additively((n, k) in label(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        prop_assume!(n >= 2);
        let m1 = ((n - 1) as f64 * a) as usize;
        let m2 = ((n - 1 - m1) as f64 * b) as usize;
        prop_assume!(m1 + m2 < n);
        let s = pure(n, k);
        let twice = s.particle_loss(m1).unwrap().particle_loss(m2).unwrap();
        let once = s.particle_loss(m1 + m2).unwrap();
        assert_same_weights(&twice, &once, 1e-12);
    }

    #[test]
    fn particle_loss_is_flip_symmetric((n, k) in label(), a in 0.0f64..1.0) {
        let m = ((n - 1) as f64 * a) as usize;
        let direct = pure(n, k).particle_loss(m).unwrap();
        let mirrored = pure(n, n - k).particle_loss(m).unwrap().flipped();
        assert_same_weights(&direct, &mirrored, 1e-12);
    }

    #[test]
    fn hardy_mixture_is_affine(
        n in 2usize..40,
        raw in proptest::collection::vec(0.0f64..1.0, 1..6),
        a0 in -PI..PI,
        a1 in -PI..PI,
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-3);
        let comps: Vec<(usize, f64)> = raw.iter().enumerate().map(|(i, w)| ((i * 7) % (n + 1), w / total)).collect();
        let mix = DickeMixture::new(n, comps.clone()).unwrap();
        let a = MeasurementPair::new(a0, a1).unwrap();
        let direct = hardy_value_mixture(&mix, &a).unwrap().value;
        let by_parts: f64 = comps.iter().map(|&(l, w)| w * hardy_value(n, l, &a).unwrap()).sum();
        prop_assert!((direct - by_parts).abs() < 1e-12);
    }

    #[test]
    fn correlators_are_bounded((n, k) in label(), xf in 0.0f64..=1.0, a0 in -PI..PI, a1 in -PI..PI) {
        let x = (n as f64 * xf) as usize;
        let a = MeasurementPair::new(a0, a1).unwrap();
        let e = symmetric_correlator(n, k, x, &a).unwrap();
        prop_assert!(e.abs() <= 1.0 + 1e-9, "E = {e}");
    }
}

#[test]
fn excitation_loss_breaks_the_flip_symmetry() {
    let direct = pure(4, 1).excitation_loss(0.3).unwrap();
    let mirrored = pure(4, 3).excitation_loss(0.3).unwrap().flipped();
    let distance: f64 = (0..=4)
        .map(|l| (direct.weight(l) - mirrored.weight(l)).abs())
        .sum();
    assert!(distance > 0.1, "{distance}");
}
