//! Predictive distributions from three uncertainty estimators.
//!
//! All three report the mean of the GPR model trained on the full training
//! set; they differ only in the standard deviation:
//!
//! - GPR standard deviation of the full model (observation noise not added),
//! - two-set: `|m₁(x) - m₂(x)|` for models trained on disjoint halves,
//! - bootstrap: Bessel-corrected standard deviation over `N` models trained on
//!   with-replacement resamples.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::gpr::{GprModel, Hyperparameters, KernelInput};
use crate::rng::{derive_seed, seeded};
use crate::{Error, Result};

/// Gaussian predictive distribution `(mean, std)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveDistribution {
    pub mean: f64,
    pub std: f64,
}

pub fn gpr_predict<T: KernelInput>(model: &GprModel<T>, x: &T) -> Result<PredictiveDistribution> {
    let (mean, std) = model.predict(x)?;
    Ok(PredictiveDistribution { mean, std })
}

fn subset<T: Clone>(inputs: &[T], targets: &[f64], idx: &[usize]) -> (Vec<T>, Vec<f64>) {
    (
        idx.iter().map(|&i| inputs[i].clone()).collect(),
        idx.iter().map(|&i| targets[i]).collect(),
    )
}

/// Two GPR models on disjoint halves of the training set plus the full model.
#[derive(Debug, Clone)]
pub struct TwoSetEstimator<T> {
    full: GprModel<T>,
    half_a: GprModel<T>,
    half_b: GprModel<T>,
    split_seed: u64,
}

impl<T: KernelInput> TwoSetEstimator<T> {
    /// Shuffles the training indices with `seed` and trains one model on each
    /// half (sizes differ by at most one).
    pub fn build(inputs: &[T], targets: &[f64], hyper: &Hyperparameters, seed: u64) -> Result<Self> {
        if inputs.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                available: inputs.len(),
            });
        }
        let full = GprModel::fit(inputs.to_vec(), targets, hyper)?;
        let mut order: Vec<usize> = (0..inputs.len()).collect();
        order.shuffle(&mut seeded(seed));
        let (a, b) = order.split_at(inputs.len() / 2);
        let (xa, ya) = subset(inputs, targets, a);
        let (xb, yb) = subset(inputs, targets, b);
        Ok(Self {
            full,
            half_a: GprModel::fit(xa, &ya, hyper)?,
            half_b: GprModel::fit(xb, &yb, hyper)?,
            split_seed: seed,
        })
    }

    pub fn from_models(full: GprModel<T>, half_a: GprModel<T>, half_b: GprModel<T>) -> Self {
        Self {
            full,
            half_a,
            half_b,
            split_seed: 0,
        }
    }

    pub fn predict(&self, x: &T) -> Result<PredictiveDistribution> {
        let mean = self.full.predict_mean(x)?;
        let a = self.half_a.predict_mean(x)?;
        let b = self.half_b.predict_mean(x)?;
        Ok(PredictiveDistribution {
            mean,
            std: (a - b).abs(),
        })
    }

    /// Rebuilds on a new training set with a fresh split; hyperparameters are kept.
    pub fn refit(&self, inputs: &[T], targets: &[f64], seed: u64) -> Result<Self> {
        Self::build(inputs, targets, self.full.hyperparameters(), seed)
    }

    pub fn full_model(&self) -> &GprModel<T> {
        &self.full
    }

    pub fn halves(&self) -> (&GprModel<T>, &GprModel<T>) {
        (&self.half_a, &self.half_b)
    }

    pub fn split_seed(&self) -> u64 {
        self.split_seed
    }
}

/// Bootstrap-aggregation ensemble plus the full model.
#[derive(Debug, Clone)]
pub struct BootstrapEstimator<T> {
    full: GprModel<T>,
    members: Vec<GprModel<T>>,
    resample_seed: u64,
}

pub const DEFAULT_ENSEMBLE_SIZE: usize = 10;

impl<T: KernelInput> BootstrapEstimator<T> {
    /// Trains `n_members` models, each on `n` indices drawn uniformly with
    /// replacement. Duplicates are kept unless `σ_n² = 0`, in which case each
    /// resample is deduplicated so the kernel matrix stays non-singular.
    pub fn build(inputs: &[T], targets: &[f64], hyper: &Hyperparameters, n_members: usize, seed: u64) -> Result<Self> {
        if n_members < 2 {
            return Err(Error::Config("bootstrap ensemble needs at least 2 members".into()));
        }
        let full = GprModel::fit(inputs.to_vec(), targets, hyper)?;
        let n = inputs.len();
        let members = (0..n_members)
            .map(|l| {
                let mut rng = seeded(derive_seed(seed, l as u64));
                let mut idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                if hyper.noise == 0.0 {
                    idx.sort_unstable();
                    idx.dedup();
                }
                let (x, y) = subset(inputs, targets, &idx);
                GprModel::fit(x, &y, hyper)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            full,
            members,
            resample_seed: seed,
        })
    }

    pub fn from_models(full: GprModel<T>, members: Vec<GprModel<T>>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::Config("bootstrap ensemble needs at least 2 members".into()));
        }
        Ok(Self {
            full,
            members,
            resample_seed: 0,
        })
    }

    pub fn predict(&self, x: &T) -> Result<PredictiveDistribution> {
        let mean = self.full.predict_mean(x)?;
        let preds = self
            .members
            .iter()
            .map(|m| m.predict_mean(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(PredictiveDistribution {
            mean,
            std: sample_std(&preds),
        })
    }

    pub fn refit(&self, inputs: &[T], targets: &[f64], seed: u64) -> Result<Self> {
        Self::build(inputs, targets, self.full.hyperparameters(), self.members.len(), seed)
    }

    pub fn full_model(&self) -> &GprModel<T> {
        &self.full
    }

    pub fn members(&self) -> &[GprModel<T>] {
        &self.members
    }

    pub fn resample_seed(&self) -> u64 {
        self.resample_seed
    }
}

/// Bessel-corrected sample standard deviation; 0 for fewer than two values.
pub(crate) fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    GprStd,
    TwoSet,
    Bootstrap,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [Self::GprStd, Self::TwoSet, Self::Bootstrap];

    pub fn name(self) -> &'static str {
        match self {
            Self::GprStd => "gpr_std",
            Self::TwoSet => "two_set",
            Self::Bootstrap => "bootstrap",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(alloc::format!("unknown estimator `{s}`")))
    }
}

/// Any of the three estimators behind one interface.
#[derive(Debug, Clone)]
pub enum Estimator<T> {
    GprStd(GprModel<T>),
    TwoSet(TwoSetEstimator<T>),
    Bootstrap(BootstrapEstimator<T>),
}

impl<T: KernelInput> Estimator<T> {
    pub fn build(
        kind: EstimatorKind,
        inputs: &[T],
        targets: &[f64],
        hyper: &Hyperparameters,
        ensemble_size: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(match kind {
            EstimatorKind::GprStd => Self::GprStd(GprModel::fit(inputs.to_vec(), targets, hyper)?),
            EstimatorKind::TwoSet => Self::TwoSet(TwoSetEstimator::build(inputs, targets, hyper, seed)?),
            EstimatorKind::Bootstrap => {
                Self::Bootstrap(BootstrapEstimator::build(inputs, targets, hyper, ensemble_size, seed)?)
            }
        })
    }

    pub fn kind(&self) -> EstimatorKind {
        match self {
            Self::GprStd(_) => EstimatorKind::GprStd,
            Self::TwoSet(_) => EstimatorKind::TwoSet,
            Self::Bootstrap(_) => EstimatorKind::Bootstrap,
        }
    }

    pub fn predict(&self, x: &T) -> Result<PredictiveDistribution> {
        match self {
            Self::GprStd(m) => gpr_predict(m, x),
            Self::TwoSet(e) => e.predict(x),
            Self::Bootstrap(e) => e.predict(x),
        }
    }

    pub fn full_model(&self) -> &GprModel<T> {
        match self {
            Self::GprStd(m) => m,
            Self::TwoSet(e) => e.full_model(),
            Self::Bootstrap(e) => e.full_model(),
        }
    }

    pub fn refit(&self, inputs: &[T], targets: &[f64], seed: u64) -> Result<Self> {
        Ok(match self {
            Self::GprStd(m) => Self::GprStd(GprModel::fit(inputs.to_vec(), targets, m.hyperparameters())?),
            Self::TwoSet(e) => Self::TwoSet(e.refit(inputs, targets, seed)?),
            Self::Bootstrap(e) => Self::Bootstrap(e.refit(inputs, targets, seed)?),
        })
    }
}
