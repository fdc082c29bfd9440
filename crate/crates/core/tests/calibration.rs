mod common;

use mlip_uq_core::calib::{
    calibration_curve, extended_reliability, ks_statistic, make_records, per_bin_error_histogram, EvaluationRecord,
};
use mlip_uq_core::uq::PredictiveDistribution;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

/// `z` with `erf(z/√2) = α`, found by bisection.
fn coverage_quantile(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if libm::erf(mid / std::f64::consts::SQRT_2) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ideal_records(n: usize, seed: u64) -> Vec<EvaluationRecord> {
    let mut r = common::rng(seed);
    (0..n)
        .map(|_| {
            let e: f64 = r.sample(StandardNormal);
            EvaluationRecord::new(0.0, 1.0, e)
        })
        .collect()
}

#[test]
fn ideal_gaussian_records_follow_the_diagonal() {
    let records = ideal_records(10_000, 1);
    let curve = calibration_curve(&records, 101).unwrap();
    assert_eq!(curve.points.len(), 101);
    for &(a, o) in &curve.points {
        assert!((o - a).abs() <= 0.02, "alpha {a}: observed {o}");
    }
    assert!(curve.miscalibration_area < 0.01, "{}", curve.miscalibration_area);
}

#[test]
fn coverage_matches_brute_force_count() {
    let mut r = common::rng(2);
    let records: Vec<EvaluationRecord> = (0..500)
        .map(|_| {
            let u = r.random_range(0.1..2.0);
            let e: f64 = r.sample(StandardNormal);
            EvaluationRecord::new(1.0, u, 1.0 + 1.3 * u * e)
        })
        .collect();
    let curve = calibration_curve(&records, 21).unwrap();
    for &(a, o) in &curve.points[1..20] {
        let z = coverage_quantile(a);
        let covered = records.iter().filter(|x| x.error.abs() <= z * x.uncertainty).count();
        assert_eq!(o, covered as f64 / 500.0, "alpha {a}");
    }
    // errors are too wide, so the curve lies below the diagonal
    assert!(curve.points[1..20].iter().all(|&(a, o)| o <= a + 0.05));
    assert!(curve.miscalibration_area > 0.03);
}

#[test]
fn reliability_recovers_generating_spread() {
    let du = 0.25;
    let mut r = common::rng(3);
    let records: Vec<EvaluationRecord> = (0..5000)
        .map(|_| {
            let u: f64 = r.random_range(0.0..3.0 * du);
            let centre = ((u / du).floor() + 0.5) * du;
            let e: f64 = r.sample(StandardNormal);
            EvaluationRecord::new(0.0, u, centre * e)
        })
        .collect();
    let bins = extended_reliability(&records, du, 50).unwrap();
    assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 5000);
    assert_eq!(bins.len(), 3);
    for b in bins.iter().filter(|b| !b.suppressed) {
        assert!(b.error_mean.abs() < 0.1 * b.center);
        assert!((b.error_std - b.center).abs() < 0.1 * b.center);
    }
}

#[test]
fn ks_statistic_of_matching_normal_is_small() {
    let records = ideal_records(2000, 4);
    let errors: Vec<f64> = records.iter().map(|r| r.error).collect();
    assert!(ks_statistic(&errors, 1.0) < 0.05);
    assert!(ks_statistic(&errors, 2.0) > 0.1);
    let bins = extended_reliability(
        &records.iter().map(|r| EvaluationRecord::new(0.0, 0.5, r.truth)).collect::<Vec<_>>(),
        1.0,
        50,
    )
    .unwrap();
    let h = per_bin_error_histogram(&records, &bins[0], 30).unwrap();
    assert_eq!(h.total(), 0, "uncertainty 1.0 records belong to bin 2, not bin 1");
}

#[test]
fn histogram_holds_bin_members() {
    let records = vec![EvaluationRecord::new(0.0, 0.3, 0.1)];
    let bins = extended_reliability(&records, 1.0, 2).unwrap();
    let h = per_bin_error_histogram(&records, &bins[0], 10).unwrap();
    assert_eq!(h.total(), 1);
    assert_eq!(h.edges.len(), 11);
}

#[test]
fn make_records_pairs_in_order() {
    let d = [
        PredictiveDistribution { mean: 1.0, std: 0.1 },
        PredictiveDistribution { mean: 2.0, std: 0.2 },
        PredictiveDistribution { mean: 3.0, std: 0.3 },
    ];
    let r = make_records(&d, &[1.5, 2.0, 2.0]).unwrap();
    assert_eq!(r.iter().map(|x| x.error).collect::<Vec<_>>(), vec![0.5, 0.0, -1.0]);
    assert!(make_records(&[], &[]).unwrap().is_empty());
    assert!(make_records(&d, &[1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coverage_is_monotone(seed in 0u64..10_000, n in 1usize..200) {
        let mut r = common::rng(seed);
        let records: Vec<EvaluationRecord> = (0..n)
            .map(|_| EvaluationRecord::new(0.0, r.random_range(0.0..2.0), r.random_range(-3.0..3.0)))
            .collect();
        let c = calibration_curve(&records, 51).unwrap();
        prop_assert!(c.points.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        prop_assert_eq!(c.points[50].1, 1.0);
        prop_assert!(c.miscalibration_area >= 0.0 && c.miscalibration_area <= 1.0);
    }

    #[test]
    fn bins_partition_records(seed in 0u64..10_000, du in 0.05..2.0f64) {
        let mut r = common::rng(seed);
        let records: Vec<EvaluationRecord> = (0..300)
            .map(|_| EvaluationRecord::new(0.0, r.random_range(0.0..3.0), r.random_range(-1.0..1.0)))
            .collect();
        let bins = extended_reliability(&records, du, 10).unwrap();
        prop_assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 300);
        for rec in &records {
            prop_assert_eq!(bins.iter().filter(|b| b.contains(rec.uncertainty)).count(), 1);
        }
        for b in &bins {
            prop_assert_eq!(b.suppressed, b.count <= 10);
        }
    }

    #[test]
    fn constant_truth_shift_moves_bin_means(seed in 0u64..10_000, c in -5.0..5.0f64) {
        let mut r = common::rng(seed);
        let base: Vec<EvaluationRecord> = (0..200)
            .map(|_| EvaluationRecord::new(r.random_range(-1.0..1.0), r.random_range(0.0..1.0), r.random_range(-1.0..1.0)))
            .collect();
        let shifted: Vec<EvaluationRecord> = base
            .iter()
            .map(|x| EvaluationRecord::new(x.mean, x.uncertainty, x.truth + c))
            .collect();
        let a = extended_reliability(&base, 0.2, 5).unwrap();
        let b = extended_reliability(&shifted, 0.2, 5).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y.error_mean - x.error_mean - c).abs() < 1e-12);
            if x.count > 1 {
                prop_assert!((y.error_std - x.error_std).abs() < 1e-12);
            }
        }
    }
}
