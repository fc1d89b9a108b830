use proptest::prelude::*;
use qjacobi::diagnostics::{participation_ratio, shannon_entropy, topk_mass, WeightDistribution};

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6f64..10.0, 1..200)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn topk_is_monotone_and_saturates(w in weights()) {
        let d = WeightDistribution::from_weights(w.iter().copied()).unwrap();
        let mut prev = 0.0;
        for k in 1..=d.support() + 2 {
            let m = topk_mass(&d, k);
            prop_assert!(m >= prev);
            prop_assert!(m > 0.0 && m <= 1.0);
            prev = m;
        }
        prop_assert_eq!(topk_mass(&d, d.support()), 1.0);
    }

    #[test]
    fn entropy_and_pr_bounds(w in weights()) {
        let d = WeightDistribution::from_weights(w.iter().copied()).unwrap();
        let (s, pr, n) = (shannon_entropy(&d), participation_ratio(&d), d.support() as f64);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
        prop_assert!(pr >= 1.0 - 1e-12 && pr <= n + 1e-9);
        // M_1 ≥ 1/PR since p_max ≥ Σp²
        prop_assert!(topk_mass(&d, 1) >= 1.0 / pr - 1e-12);
    }

    #[test]
    fn amplitude_sign_and_scale_do_not_matter(a in prop::collection::vec(-1.0f64..1.0, 1..50), scale in 1e-3f64..1e3) {
        prop_assume!(a.iter().any(|x| x.abs() > 1e-6));
        let d1 = WeightDistribution::from_amplitudes(a.iter().copied()).unwrap();
        let d2 = WeightDistribution::from_amplitudes(a.iter().map(|x| -x * scale)).unwrap();
        prop_assert_eq!(d1.support(), d2.support());
        prop_assert!((shannon_entropy(&d1) - shannon_entropy(&d2)).abs() < 1e-12);
        prop_assert!((participation_ratio(&d1) - participation_ratio(&d2)).abs() < 1e-9 * participation_ratio(&d1));
    }
}

#[test]
fn support_cutoff_excludes_tiny_amplitudes() {
    let d = WeightDistribution::from_amplitudes([0.5, 1e-13, -0.5, 0.0]).unwrap();
    assert_eq!(d.support(), 2);
    assert!(WeightDistribution::from_amplitudes([1e-13, 0.0]).is_none());
    assert!(WeightDistribution::from_weights([]).is_none());
}

#[test]
fn uniform_distribution_closed_forms() {
    for n in [2usize, 7, 64] {
        let d = WeightDistribution::from_weights(vec![1.0; n]).unwrap();
        assert!((shannon_entropy(&d) - 1.0).abs() < 1e-12);
        assert!((participation_ratio(&d) - n as f64).abs() < 1e-12);
        for k in 1..=n {
            assert!((topk_mass(&d, k) - k as f64 / n as f64).abs() < 1e-12);
        }
    }
}
