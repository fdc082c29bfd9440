//! Pool-based active learning by uncertainty sampling.
//!
//! One sample per iteration: score every remaining pool candidate, label the
//! best one, retrain with frozen hyperparameters and record test-set error
//! statistics. Random selection and selection by the true absolute error
//! (an oracle that peeks at pool labels) serve as baselines.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;
use rand::seq::IndexedRandom;

use crate::gpr::{GprModel, Hyperparameters, KernelInput};
use crate::par::map_range;
use crate::rng::{derive_seed, seeded};
use crate::uq::{Estimator, EstimatorKind, DEFAULT_ENSEMBLE_SIZE};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    GprStd,
    TwoSet,
    Bootstrap,
    Random,
    OracleMaxError,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Self::GprStd,
        Self::TwoSet,
        Self::Bootstrap,
        Self::Random,
        Self::OracleMaxError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GprStd => "gpr_std",
            Self::TwoSet => "two_set",
            Self::Bootstrap => "bootstrap",
            Self::Random => "random",
            Self::OracleMaxError => "oracle_max_error",
        }
    }

    /// Estimator backing the model; baselines only need the plain GPR.
    pub fn estimator(self) -> EstimatorKind {
        match self {
            Self::TwoSet => EstimatorKind::TwoSet,
            Self::Bootstrap => EstimatorKind::Bootstrap,
            _ => EstimatorKind::GprStd,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlConfig {
    pub n_init: usize,
    pub n_iter: usize,
    pub strategy: Strategy,
    pub seed: u64,
    /// Redraw ensemble splits/resamples with a per-iteration seed. When off,
    /// every refit reuses the run seed.
    pub refit_ensembles: bool,
    pub ensemble_size: usize,
    /// Extend the Cholesky factor instead of refitting (plain GPR only).
    pub incremental: bool,
}

impl Default for AlConfig {
    fn default() -> Self {
        Self {
            n_init: 200,
            n_iter: 0,
            strategy: Strategy::GprStd,
            seed: 0,
            refit_ensembles: true,
            ensemble_size: DEFAULT_ENSEMBLE_SIZE,
            incremental: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub mae: f64,
    pub max_abs_error: f64,
    /// Bessel-corrected variance of the absolute errors.
    pub abs_error_variance: f64,
}

/// MAE, maximum and variance of the absolute errors `|truth - prediction|`.
pub fn evaluate_metrics(predictions: &[f64], truths: &[f64]) -> Result<Metrics> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: truths.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::Empty("metric inputs"));
    }
    let abs: Vec<f64> = predictions.iter().zip(truths).map(|(p, t)| (t - p).abs()).collect();
    let n = abs.len() as f64;
    let mae = abs.iter().sum::<f64>() / n;
    let max_abs_error = abs.iter().fold(0.0f64, |m, &e| m.max(e));
    let abs_error_variance = if abs.len() > 1 {
        abs.iter().map(|e| (e - mae) * (e - mae)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(Metrics {
        mae,
        max_abs_error,
        abs_error_variance,
    })
}

/// Pool index with the largest score. NaN scores are skipped; ties go to the
/// lowest pool index.
pub fn argmax_selection(scores: &[f64], pool_indices: &[usize]) -> Result<usize> {
    if scores.len() != pool_indices.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: pool_indices.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::Empty("selection candidates"));
    }
    let mut best: Option<(f64, usize)> = None;
    for (&s, &idx) in scores.iter().zip(pool_indices) {
        if s.is_nan() {
            continue;
        }
        best = match best {
            Some((bs, bi)) if bs > s || (bs == s && bi < idx) => Some((bs, bi)),
            _ => Some((s, idx)),
        };
    }
    best.map(|(_, i)| i)
        .ok_or_else(|| Error::NonFinite("every selection score is NaN".into()))
}

/// Pool labels behind an access guard: a label can be read only after it was
/// acquired through [`GuardedPool::acquire`], except through the explicitly
/// counted [`GuardedPool::oracle_label`].
#[derive(Debug, Clone)]
pub struct GuardedPool<'a> {
    labels: &'a [f64],
    acquired: Vec<bool>,
    oracle_reads: usize,
}

impl<'a> GuardedPool<'a> {
    pub fn new(labels: &'a [f64]) -> Self {
        Self {
            labels,
            acquired: vec![false; labels.len()],
            oracle_reads: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels a sample; each sample can be acquired once.
    pub fn acquire(&mut self, idx: usize) -> Result<f64> {
        if self.acquired[idx] {
            return Err(Error::Invariant(format!("pool sample {idx} acquired twice")));
        }
        self.acquired[idx] = true;
        Ok(self.labels[idx])
    }

    pub fn label(&self, idx: usize) -> Result<f64> {
        if !self.acquired[idx] {
            return Err(Error::Invariant(format!("label of unlabelled pool sample {idx} requested")));
        }
        Ok(self.labels[idx])
    }

    pub fn is_acquired(&self, idx: usize) -> bool {
        self.acquired[idx]
    }

    /// Reads a label without acquiring it. Only the oracle baseline may call this.
    pub fn oracle_label(&mut self, idx: usize) -> f64 {
        self.oracle_reads += 1;
        self.labels[idx]
    }

    pub fn oracle_reads(&self) -> usize {
        self.oracle_reads
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// `None` for the initial model.
    pub selected_index: Option<usize>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlTrace {
    pub strategy: Strategy,
    /// Initial model first, then one row per iteration.
    pub rows: Vec<TraceRow>,
    /// The pool ran out before `n_iter` iterations.
    pub truncated: bool,
    pub initial_indices: Vec<usize>,
    pub oracle_reads: usize,
}

impl AlTrace {
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().filter_map(|r| r.selected_index)
    }

    pub fn final_metrics(&self) -> Metrics {
        self.rows.last().expect("trace always holds the initial row").metrics
    }
}

enum Model<T> {
    Plain(GprModel<T>),
    Ensemble(Estimator<T>),
}

impl<T: KernelInput> Model<T> {
    fn full(&self) -> &GprModel<T> {
        match self {
            Self::Plain(m) => m,
            Self::Ensemble(e) => e.full_model(),
        }
    }

    fn uncertainty(&self, x: &T) -> Result<f64> {
        match self {
            Self::Plain(m) => m.predict_std(x),
            Self::Ensemble(e) => Ok(e.predict(x)?.std),
        }
    }
}

fn test_metrics<T: KernelInput>(model: &GprModel<T>, test: &[T], truths: &[f64]) -> Result<Metrics> {
    let preds = map_range(test.len(), |i| model.predict_mean(&test[i]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    evaluate_metrics(&preds, truths)
}

/// Runs one active-learning campaign and returns its trace.
///
/// Pool and test set are separate collections, so test samples can never
/// enter training. Labels of the pool are only read through a [`GuardedPool`].
pub fn run_uncertainty_sampling<T: KernelInput>(
    pool: &[T],
    pool_labels: &[f64],
    test: &[T],
    test_labels: &[f64],
    hyper: &Hyperparameters,
    cfg: &AlConfig,
) -> Result<AlTrace> {
    if pool.len() != pool_labels.len() {
        return Err(Error::LengthMismatch {
            left: pool.len(),
            right: pool_labels.len(),
        });
    }
    if test.len() != test_labels.len() {
        return Err(Error::LengthMismatch {
            left: test.len(),
            right: test_labels.len(),
        });
    }
    if cfg.n_init == 0 {
        return Err(Error::Config("n_init must be at least 1".into()));
    }
    if cfg.n_init > pool.len() {
        return Err(Error::InsufficientSamples {
            needed: cfg.n_init,
            available: pool.len(),
        });
    }
    let mut guard = GuardedPool::new(pool_labels);
    let all: Vec<usize> = (0..pool.len()).collect();
    let initial: Vec<usize> = {
        let mut rng = seeded(derive_seed(cfg.seed, 0));
        let mut v: Vec<usize> = all.choose_multiple(&mut rng, cfg.n_init).copied().collect();
        v.sort_unstable();
        v
    };
    let mut train_idx = initial.clone();
    let mut train_x: Vec<T> = Vec::with_capacity(cfg.n_init + cfg.n_iter);
    let mut train_y: Vec<f64> = Vec::with_capacity(cfg.n_init + cfg.n_iter);
    for &i in &initial {
        train_y.push(guard.acquire(i)?);
        train_x.push(pool[i].clone());
    }
    let mut remaining: Vec<usize> = all.into_iter().filter(|&i| !guard.is_acquired(i)).collect();

    let ensemble_seed = |iteration: usize| {
        if cfg.refit_ensembles {
            derive_seed(cfg.seed, 1_000_000 + iteration as u64)
        } else {
            cfg.seed
        }
    };
    let kind = cfg.strategy.estimator();
    let mut model = match kind {
        EstimatorKind::GprStd => Model::Plain(GprModel::fit(train_x.clone(), &train_y, hyper)?),
        _ => Model::Ensemble(Estimator::build(
            kind,
            &train_x,
            &train_y,
            hyper,
            cfg.ensemble_size,
            ensemble_seed(0),
        )?),
    };

    let mut rows = vec![TraceRow {
        iteration: 0,
        selected_index: None,
        metrics: test_metrics(model.full(), test, test_labels)?,
    }];
    let mut random_rng = seeded(derive_seed(cfg.seed, 2));
    let mut truncated = false;

    for iteration in 1..=cfg.n_iter {
        if remaining.is_empty() {
            truncated = true;
            break;
        }
        let selected = match cfg.strategy {
            Strategy::Random => *remaining.choose(&mut random_rng).expect("non-empty"),
            Strategy::OracleMaxError => {
                let means = map_range(remaining.len(), |k| model.full().predict_mean(&pool[remaining[k]]))
                    .into_iter()
                    .collect::<Result<Vec<_>>>()?;
                let scores: Vec<f64> = remaining
                    .iter()
                    .zip(&means)
                    .map(|(&i, m)| (guard.oracle_label(i) - m).abs())
                    .collect();
                argmax_selection(&scores, &remaining)?
            }
            _ => {
                let scores = map_range(remaining.len(), |k| model.uncertainty(&pool[remaining[k]]))
                    .into_iter()
                    .collect::<Result<Vec<_>>>()?;
                argmax_selection(&scores, &remaining)?
            }
        };

        let y = guard.acquire(selected)?;
        let pos = remaining
            .iter()
            .position(|&i| i == selected)
            .ok_or_else(|| Error::Invariant(format!("selected index {selected} is not in the pool")))?;
        remaining.remove(pos);
        train_idx.push(selected);
        train_x.push(pool[selected].clone());
        train_y.push(y);

        model = match model {
            Model::Plain(mut m) if cfg.incremental => {
                m.push_sample(pool[selected].clone(), y)?;
                Model::Plain(m)
            }
            Model::Plain(_) => Model::Plain(GprModel::fit(train_x.clone(), &train_y, hyper)?),
            Model::Ensemble(e) => Model::Ensemble(e.refit(&train_x, &train_y, ensemble_seed(iteration))?),
        };

        if train_idx.len() != cfg.n_init + iteration
            || remaining.len() + train_idx.len() != pool.len()
            || model.full().n_train() != train_idx.len()
        {
            return Err(Error::Invariant(format!(
                "iteration {iteration}: {} training, {} remaining of {}",
                train_idx.len(),
                remaining.len(),
                pool.len()
            )));
        }
        for &i in &train_idx {
            guard.label(i)?;
        }

        rows.push(TraceRow {
            iteration,
            selected_index: Some(selected),
            metrics: test_metrics(model.full(), test, test_labels)?,
        });
    }

    Ok(AlTrace {
        strategy: cfg.strategy,
        rows,
        truncated,
        initial_indices: initial,
        oracle_reads: guard.oracle_reads(),
    })
}

/// 1-D benchmark: noisy `sin` samples as the pool, noise-free `sin` as test truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SineBenchmark {
    pub pool: Vec<Vec<f64>>,
    pub pool_labels: Vec<f64>,
    pub test: Vec<Vec<f64>>,
    pub test_labels: Vec<f64>,
}

impl SineBenchmark {
    pub fn generate(n_pool: usize, n_test: usize, noise_std: f64, seed: u64) -> Result<Self> {
        let f = crate::data::synth_sine(n_pool, n_test, noise_std, seed)?;
        Ok(Self {
            pool: f.train_inputs(),
            pool_labels: f.train_y.clone(),
            test_labels: f.test_x.iter().map(|x| x.sin()).collect(),
            test: f.test_inputs(),
        })
    }

    /// Fixed hyperparameters used with this benchmark.
    pub fn hyperparameters() -> Hyperparameters {
        Hyperparameters::new(
            crate::gpr::KernelParams::new(1.0, vec![1.0]).expect("valid constants"),
            1e-4,
        )
        .expect("valid constants")
    }

    pub fn run(&self, cfg: &AlConfig) -> Result<AlTrace> {
        run_uncertainty_sampling(
            &self.pool,
            &self.pool_labels,
            &self.test,
            &self.test_labels,
            &Self::hyperparameters(),
            cfg,
        )
    }
}
