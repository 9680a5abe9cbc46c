use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rffso::rf::*;

#[test]
fn fresh_csi_recovers_order_statistic() {
    let l = RfLink::new(2, 2, 1.0, 0.999).unwrap();
    let n_s = 5;
    let t = enumerate_selection_table(&l, n_s, SelectionMode::Max).unwrap();
    let mut worst: f64 = 0.0;
    for i in 1..400 {
        let x = 0.025 * i as f64;
        worst = worst.max((selected_snr_cdf(&t, x) - mrc_cdf(&l, x).powi(n_s as i32)).abs());
    }
    assert!(worst <= 0.02, "{worst}");
    // Minimum selection mirrors it: 1 - (1 - F)^N.
    let t = enumerate_selection_table(&l, n_s, SelectionMode::Min).unwrap();
    for i in 1..200 {
        let x = 0.025 * i as f64;
        let want = 1.0 - (1.0 - mrc_cdf(&l, x)).powi(n_s as i32);
        assert!((selected_snr_cdf(&t, x) - want).abs() <= 0.02);
    }
}

#[test]
fn sampled_selection_matches_table() {
    let l = RfLink::new(2, 1, 0.8, 0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for mode in [SelectionMode::Max, SelectionMode::Min] {
        let t = enumerate_selection_table(&l, 3, mode).unwrap();
        let mut v: Vec<f64> =
            (0..40_000).map(|_| sample_selection_pair(&l, 3, mode, &mut rng).selected_transmission_snr).collect();
        let d = rffso::montecarlo::kolmogorov_smirnov(&mut v, |x| selected_snr_cdf(&t, x));
        assert!(d < rffso::montecarlo::ks_critical_1pct(v.len()), "{mode:?}: {d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_keeps_selected_index(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let l = RfLink::new(1, 2, 1.0, 0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = sample_selection_pair(&l, 6, SelectionMode::Max, &mut rng);
        let scaled: Vec<f64> = d.selection.iter().map(|v| v * scale).collect();
        prop_assert_eq!(select_index(&scaled, SelectionMode::Max), d.index);
        prop_assert_eq!(select_index(&scaled, SelectionMode::Min), select_index(&d.selection, SelectionMode::Min));
    }

    #[test]
    fn selected_cdfs_bracket_single_antenna(x in 0.01f64..20.0, rho in 0.05f64..0.95) {
        let l = RfLink::new(2, 1, 1.5, rho).unwrap();
        let hi = enumerate_selection_table(&l, 3, SelectionMode::Max).unwrap();
        let lo = enumerate_selection_table(&l, 3, SelectionMode::Min).unwrap();
        let f = mrc_cdf(&l, x);
        prop_assert!(selected_snr_cdf(&hi, x) <= f + 1e-9);
        prop_assert!(selected_snr_cdf(&lo, x) >= f - 1e-9);
    }
}
