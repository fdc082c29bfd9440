use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;
use rand::seq::SliceRandom;

use super::kernel::{KernelInput, KernelParams};
use super::model::{GprModel, Hyperparameters};
use super::optimize::{optimize_hyperparameters, OptimizerConfig};
use crate::rng::{derive_seed, seeded};
use crate::{Error, Result};

/// One starting point for marginal-likelihood optimisation. The length-scale
/// is replicated over all feature dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperInit {
    pub lengthscale: f64,
    pub output_scale: f64,
    pub noise: f64,
}

impl HyperInit {
    pub fn to_hyperparameters(&self, dim: usize) -> Result<Hyperparameters> {
        Hyperparameters::new(KernelParams::isotropic(self.output_scale, self.lengthscale, dim)?, self.noise)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperInitGrid {
    pub lengthscale_inits: Vec<f64>,
    pub output_scale_inits: Vec<f64>,
    pub noise_inits: Vec<f64>,
}

impl HyperInitGrid {
    /// Length-scales {2, 10^0.75, 10^1.5}, output scale {1}, noise {1e-4, 1e-6, 1e-8}.
    pub fn standard() -> Self {
        Self {
            lengthscale_inits: vec![2.0, 10f64.powf(0.75), 10f64.powf(1.5)],
            output_scale_inits: vec![1.0],
            noise_inits: vec![1e-4, 1e-6, 1e-8],
        }
    }

    pub fn single(init: HyperInit) -> Self {
        Self {
            lengthscale_inits: vec![init.lengthscale],
            output_scale_inits: vec![init.output_scale],
            noise_inits: vec![init.noise],
        }
    }

    /// All combinations, length-scale outermost.
    pub fn combinations(&self) -> Vec<HyperInit> {
        let mut out = Vec::new();
        for &lengthscale in &self.lengthscale_inits {
            for &output_scale in &self.output_scale_inits {
                for &noise in &self.noise_inits {
                    out.push(HyperInit {
                        lengthscale,
                        output_scale,
                        noise,
                    });
                }
            }
        }
        out
    }
}

impl Default for HyperInitGrid {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            repetitions: 5,
            seed: 0,
            optimizer: OptimizerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvEntry {
    pub init: HyperInit,
    /// Held-out losses in evaluation order (repetition-major). Stops at the
    /// first failed fold.
    pub fold_losses: Vec<f64>,
    /// `+∞` if any fold failed.
    pub mean_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub entries: Vec<CvEntry>,
    pub best: HyperInit,
}

/// Mean negative log predictive density of held-out targets, with the
/// observation noise included in the predictive variance.
fn held_out_nlpd<T: KernelInput>(model: &GprModel<T>, inputs: &[T], targets: &[f64]) -> Result<f64> {
    let noise = model.noise();
    let mut total = 0.0;
    for (x, &y) in inputs.iter().zip(targets) {
        let (m, s) = model.predict(x)?;
        let var = s * s + noise;
        total += 0.5 * (2.0 * PI * var).ln() + (y - m) * (y - m) / (2.0 * var);
    }
    Ok(total / inputs.len() as f64)
}

fn fold_loss<T: KernelInput>(
    inputs: &[T],
    targets: &[f64],
    train: &[usize],
    test: &[usize],
    init: &Hyperparameters,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    let tx: Vec<T> = train.iter().map(|&i| inputs[i].clone()).collect();
    let ty: Vec<f64> = train.iter().map(|&i| targets[i]).collect();
    let outcome = optimize_hyperparameters(&tx, &ty, init, cfg)?;
    if let Some(why) = outcome.aborted {
        return Err(Error::NonFinite(why));
    }
    let model = GprModel::fit(tx, &ty, &outcome.hyper)?;
    let vx: Vec<T> = test.iter().map(|&i| inputs[i].clone()).collect();
    let vy: Vec<f64> = test.iter().map(|&i| targets[i]).collect();
    held_out_nlpd(&model, &vx, &vy)
}

/// Repeated k-fold cross validation over every grid combination; returns the
/// combination with the lowest mean held-out loss. Every combination sees the
/// same fold partitions.
pub fn select_initial_guess<T: KernelInput>(
    inputs: &[T],
    targets: &[f64],
    grid: &HyperInitGrid,
    cfg: &CvConfig,
) -> Result<CvReport> {
    if inputs.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: inputs.len(),
            right: targets.len(),
        });
    }
    let n = inputs.len();
    let needed = 10.max(cfg.folds);
    if n < needed {
        return Err(Error::InsufficientSamples { needed, available: n });
    }
    if cfg.folds < 2 || cfg.repetitions < 1 {
        return Err(Error::Config(format!(
            "need at least 2 folds and 1 repetition, got {} and {}",
            cfg.folds, cfg.repetitions
        )));
    }
    let combos = grid.combinations();
    if combos.is_empty() {
        return Err(Error::Config("empty initial-guess grid".into()));
    }
    let dim = inputs[0].feature_dim();

    // (train, test) index sets, repetition-major.
    let mut splits = Vec::with_capacity(cfg.folds * cfg.repetitions);
    for rep in 0..cfg.repetitions {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut seeded(derive_seed(cfg.seed, rep as u64)));
        for f in 0..cfg.folds {
            let lo = f * n / cfg.folds;
            let hi = (f + 1) * n / cfg.folds;
            let test = order[lo..hi].to_vec();
            let train: Vec<usize> = order[..lo].iter().chain(&order[hi..]).copied().collect();
            splits.push((train, test));
        }
    }

    let mut entries = Vec::with_capacity(combos.len());
    for init in combos {
        let mut fold_losses = Vec::with_capacity(splits.len());
        let mut failed = false;
        match init.to_hyperparameters(dim) {
            Ok(h) => {
                for (train, test) in &splits {
                    match fold_loss(inputs, targets, train, test, &h, &cfg.optimizer) {
                        Ok(l) if l.is_finite() => fold_losses.push(l),
                        _ => {
                            failed = true;
                            break;
                        }
                    }
                }
            }
            Err(_) => failed = true,
        }
        let mean_loss = if failed {
            f64::INFINITY
        } else {
            fold_losses.iter().sum::<f64>() / fold_losses.len() as f64
        };
        entries.push(CvEntry {
            init,
            fold_losses,
            mean_loss,
        });
    }

    let best = entries
        .iter()
        .filter(|e| e.mean_loss.is_finite())
        .fold(None::<&CvEntry>, |acc, e| match acc {
            Some(b) if b.mean_loss <= e.mean_loss => Some(b),
            _ => Some(e),
        })
        .ok_or_else(|| Error::NonFinite("every initial guess failed cross validation".into()))?
        .init;
    Ok(CvReport { entries, best })
}
