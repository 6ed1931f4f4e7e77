use proptest::prelude::*;
use specmel_core::stats::{
    paired_comparison, paired_t_test, qq_data, shapiro_wilk, student_t_cdf, PairedSample,
};

const REFERENCE: &str = include_str!("data/shapiro_reference.txt");

#[test]
fn shapiro_matches_reference_implementation() {
    let mut checked = 0;
    for line in REFERENCE.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let mut it = line.split_whitespace();
        let label = it.next().unwrap();
        let n: usize = it.next().unwrap().parse().unwrap();
        let w: f64 = it.next().unwrap().parse().unwrap();
        let p: f64 = it.next().unwrap().parse().unwrap();
        let values: Vec<f64> = it.map(|v| v.parse().unwrap()).collect();
        assert_eq!(values.len(), n, "{label}");
        let got = shapiro_wilk(&values).unwrap();
        assert!((got.w - w).abs() < 1e-3, "{label} n={n}: W {} vs {w}", got.w);
        assert!((got.p - p).abs() < 1e-3, "{label} n={n}: p {} vs {p}", got.p);
        checked += 1;
    }
    assert_eq!(checked, 20);
}

#[test]
fn shapiro_on_normal_quantiles_and_bimodal() {
    let n = 20;
    let q: Vec<f64> = qq_data(&(0..n).map(|i| i as f64).collect::<Vec<_>>())
        .unwrap()
        .iter()
        .map(|p| p.theoretical)
        .collect();
    let r = shapiro_wilk(&q).unwrap();
    assert!((r.w - 0.997_179_693_088_336).abs() < 1e-4, "{}", r.w);
    assert!(r.p > 0.99);

    let mut bimodal = vec![0.0; 10];
    bimodal.extend([100.0; 10]);
    let r = shapiro_wilk(&bimodal).unwrap();
    assert!((r.w - 0.641_119_227_579_156_6).abs() < 1e-4, "{}", r.w);
    assert!(r.p < 1e-4);
}

#[test]
fn t_cdf_against_reference() {
    for (x, df, want) in [
        (1.0, 1.0, 0.75),
        (2.5, 7.0, 0.979_503_890_707_123_6),
        (-1.3, 30.0, 0.101_750_479_269_058_45),
    ] {
        assert!((student_t_cdf(x, df) - want).abs() < 1e-10, "t({x}, {df})");
    }
}

proptest! {
    #[test]
    fn t_test_is_scale_invariant(
        d in prop::collection::vec(-5.0f64..5.0, 3..40),
        scale in 0.01f64..100.0,
    ) {
        prop_assume!(d.iter().any(|v| (v - d[0]).abs() > 1e-6));
        let a = paired_t_test(&d).unwrap();
        let scaled: Vec<f64> = d.iter().map(|v| v * scale).collect();
        let b = paired_t_test(&scaled).unwrap();
        prop_assert!((a.t - b.t).abs() <= 1e-8 * a.t.abs().max(1.0));
        prop_assert!((0.0..=1.0).contains(&a.p));
    }

    #[test]
    fn shapiro_bounds_and_location_invariance(
        d in prop::collection::vec(-10.0f64..10.0, 3..120),
        shift in -50.0f64..50.0,
    ) {
        prop_assume!(d.iter().any(|v| (v - d[0]).abs() > 1e-6));
        let a = shapiro_wilk(&d).unwrap();
        prop_assert!(a.w > 0.0 && a.w <= 1.0);
        prop_assert!((0.0..=1.0).contains(&a.p));
        let moved: Vec<f64> = d.iter().map(|v| v + shift).collect();
        let b = shapiro_wilk(&moved).unwrap();
        prop_assert!((a.w - b.w).abs() < 1e-9);
    }

    #[test]
    fn swapping_conditions_negates_t(
        pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..30),
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let labels = (0..a.len()).map(|i| i.to_string()).collect();
        let s = PairedSample::new(labels, a, b).unwrap();
        let d: Vec<f64> = s.a().iter().zip(s.b()).map(|(x, y)| x - y).collect();
        prop_assume!(d.iter().any(|v| (v - d[0]).abs() > 1e-9));
        let fwd = paired_comparison(&s).unwrap();
        let rev = paired_comparison(&s.swapped()).unwrap();
        prop_assert!((fwd.t_statistic + rev.t_statistic).abs() < 1e-9);
        prop_assert!((fwd.p_value - rev.p_value).abs() < 1e-12);
        prop_assert!((fwd.shapiro_w - rev.shapiro_w).abs() < 1e-9);
    }
}
