//! Self-calibration fixture: a GPR model judged on targets drawn from its own
//! predictive distribution must look calibrated.

use alloc::vec::Vec;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use crate::calib::{calibration_curve, extended_reliability, CalibrationCurve, EvaluationRecord, ReliabilityBin};
use crate::data::{draw_synthetic_targets, synth_sine, TargetNoise, DEFAULT_SINE_NOISE, DEFAULT_SINE_TRAIN};
use crate::gpr::{optimize_hyperparameters, GprModel, HyperInit, Hyperparameters, OptimizerConfig};
use crate::par::map_range;
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Smallest noise variance used to start the optimiser when the fixture is noise free.
const MIN_NOISE_INIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheckConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub noise_std: f64,
    pub seed: u64,
    /// Fixed bin width. `None` derives it from the smallest predicted
    /// uncertainty, see [`SelfCheckConfig::bins_below_minimum`].
    pub delta_u: Option<f64>,
    /// With a derived width, the smallest uncertainty sits exactly on the lower
    /// edge of bin `bins_below_minimum + 1`, so no displayed bin is only
    /// partially populated from below.
    pub bins_below_minimum: usize,
    pub min_count: usize,
    pub n_alphas: usize,
    pub target_noise: TargetNoise,
    pub optimizer: OptimizerConfig,
    /// Width of the allowed band for a bin's error mean, in standard errors.
    pub mean_tolerance: f64,
    /// Allowed relative deviation of a bin's error std from its centre.
    pub std_tolerance: f64,
    pub max_area: f64,
}

impl Default for SelfCheckConfig {
    fn default() -> Self {
        Self {
            n_train: DEFAULT_SINE_TRAIN,
            n_test: 2000,
            noise_std: DEFAULT_SINE_NOISE,
            seed: 0,
            delta_u: None,
            bins_below_minimum: 5,
            min_count: crate::calib::DEFAULT_MIN_COUNT,
            n_alphas: crate::calib::DEFAULT_N_ALPHAS,
            target_noise: TargetNoise::PredictiveOnly,
            optimizer: OptimizerConfig::default(),
            mean_tolerance: 3.0,
            std_tolerance: 0.15,
            max_area: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinVerdict {
    pub bin: ReliabilityBin,
    pub mean_bound: f64,
    pub mean_ok: bool,
    pub std_ok: bool,
}

impl BinVerdict {
    pub fn passed(&self) -> bool {
        self.mean_ok && self.std_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheckReport {
    pub hyper: Hyperparameters,
    pub delta_u: f64,
    pub records: Vec<EvaluationRecord>,
    pub curve: CalibrationCurve,
    /// Every bin, suppressed ones included; only displayed bins are judged.
    pub bins: Vec<ReliabilityBin>,
    pub verdicts: Vec<BinVerdict>,
    pub area_ok: bool,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.area_ok && !self.verdicts.is_empty() && self.verdicts.iter().all(BinVerdict::passed)
    }
}

pub fn run_self_check(cfg: &SelfCheckConfig) -> Result<SelfCheckReport> {
    let fixture = synth_sine(cfg.n_train, cfg.n_test, cfg.noise_std, derive_seed(cfg.seed, 0))?;
    let inputs = fixture.train_inputs();
    let init = HyperInit {
        lengthscale: 1.0,
        output_scale: 1.0,
        noise: (cfg.noise_std * cfg.noise_std).max(MIN_NOISE_INIT),
    }
    .to_hyperparameters(1)?;
    let hyper = optimize_hyperparameters(&inputs, &fixture.train_y, &init, &cfg.optimizer)?.hyper;
    let model = GprModel::fit(inputs, &fixture.train_y, &hyper)?;

    let test = fixture.test_inputs();
    let targets = draw_synthetic_targets(&model, &test, derive_seed(cfg.seed, 1), cfg.target_noise)?;
    let records = map_range(test.len(), |i| model.predict(&test[i]))
        .into_iter()
        .zip(&targets)
        .map(|(p, &y)| p.map(|(m, s)| EvaluationRecord::new(m, s, y)))
        .collect::<Result<Vec<_>>>()?;

    let delta_u = match cfg.delta_u {
        Some(d) => d,
        None => {
            if cfg.bins_below_minimum == 0 {
                return Err(Error::Config("bins_below_minimum must be at least 1".into()));
            }
            let u_min = records.iter().map(|r| r.uncertainty).fold(f64::INFINITY, f64::min);
            // shade below the exact ratio so rounding never drops u_min into the bin beneath
            u_min / cfg.bins_below_minimum as f64 * (1.0 - 1e-12)
        }
    };
    let curve = calibration_curve(&records, cfg.n_alphas)?;
    let bins = extended_reliability(&records, delta_u, cfg.min_count)?;
    let verdicts = bins
        .iter()
        .filter(|b| !b.suppressed)
        .map(|b| {
            let mean_bound = cfg.mean_tolerance * b.center / (b.count as f64).sqrt();
            BinVerdict {
                bin: b.clone(),
                mean_bound,
                mean_ok: b.error_mean.abs() <= mean_bound,
                std_ok: (b.error_std - b.center).abs() <= cfg.std_tolerance * b.center,
            }
        })
        .collect();
    Ok(SelfCheckReport {
        hyper,
        delta_u,
        area_ok: curve.miscalibration_area < cfg.max_area,
        records,
        curve,
        bins,
        verdicts,
    })
}
