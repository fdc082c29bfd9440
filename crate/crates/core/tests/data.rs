mod common;

use mlip_uq_core::data::{draw_synthetic_targets, split_indices, synth_sine, SplitSpec, TargetNoise};
use mlip_uq_core::gpr::{GprModel, Hyperparameters, KernelParams};
use proptest::prelude::*;

#[test]
fn sine_noise_averages_out() {
    let f = synth_sine(10_000, 0, 0.2, 5).unwrap();
    let mean = f.train_x.iter().zip(&f.train_y).map(|(x, y)| y - x.sin()).sum::<f64>() / 10_000.0;
    assert!(mean.abs() <= 3.0 * 0.2 / 100.0, "{mean}");
    assert!(f.train_x.iter().all(|x| (0.0..=std::f64::consts::TAU).contains(x)));
    assert_eq!(f, synth_sine(10_000, 0, 0.2, 5).unwrap());
}

#[test]
fn synthetic_target_spread_matches_model() {
    let hyper = Hyperparameters::new(KernelParams::new(1.0, vec![0.8]).unwrap(), 0.04).unwrap();
    let model = GprModel::fit(vec![vec![0.0], vec![1.0]], &[0.3, -0.2], &hyper).unwrap();
    let q = vec![0.6];
    let inputs = vec![q.clone(); 10_000];
    let (m, s) = model.predict(&q).unwrap();
    for (noise, var) in [
        (TargetNoise::WithObservationNoise, s * s + 0.04),
        (TargetNoise::PredictiveOnly, s * s),
    ] {
        let t = draw_synthetic_targets(&model, &inputs, 8, noise).unwrap();
        let mean = t.iter().sum::<f64>() / t.len() as f64;
        let sd = (t.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t.len() - 1) as f64).sqrt();
        assert!((sd / var.sqrt() - 1.0).abs() < 0.03, "{noise:?}: {sd} vs {}", var.sqrt());
        assert!((mean - m).abs() < 4.0 * var.sqrt() / 100.0);
        assert_eq!(t, draw_synthetic_targets(&model, &inputs, 8, noise).unwrap());
    }
}

#[test]
fn default_split_of_3300() {
    let s = split_indices(3300, &SplitSpec::default()).unwrap();
    assert_eq!((s.train.len(), s.test.len(), s.pool.len()), (1000, 2000, 300));
    assert!(split_indices(2999, &SplitSpec::default()).is_err());
}

proptest! {
    #[test]
    fn splits_partition_the_index_range(n in 2usize..400, a in 0usize..200, b in 0usize..200, seed in any::<u64>()) {
        prop_assume!(a + b <= n);
        let spec = SplitSpec { n_train: a, n_test: b, seed };
        let s = split_indices(n, &spec).unwrap();
        prop_assert_eq!((s.train.len(), s.test.len()), (a, b));
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).chain(&s.pool).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(s, split_indices(n, &spec).unwrap());
    }
}
