use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use super::kernel::{KernelInput, KernelParams};
use super::mll::{log_marginal_likelihood, log_marginal_likelihood_with_gradient};
use super::model::Hyperparameters;
use crate::{Error, Result};

/// ADAM settings for marginal-likelihood maximisation.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub steps: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            steps: 200,
            learning_rate: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationOutcome {
    pub hyper: Hyperparameters,
    /// MLL at `hyper`.
    pub mll: f64,
    pub initial_mll: f64,
    pub steps_taken: usize,
    /// Set when a non-finite value stopped the run early; `hyper` is then the
    /// best point seen.
    pub aborted: Option<String>,
}

fn to_log(h: &Hyperparameters) -> Vec<f64> {
    let mut theta = Vec::with_capacity(h.dim() + 2);
    theta.push(h.kernel.output_scale().ln());
    theta.extend(h.kernel.lengthscales().iter().map(|l| l.ln()));
    theta.push(h.noise.ln());
    theta
}

fn from_log(theta: &[f64]) -> Result<Hyperparameters> {
    let d = theta.len() - 2;
    let kernel = KernelParams::new(theta[0].exp(), theta[1..=d].iter().map(|t| t.exp()).collect())?;
    Hyperparameters::new(kernel, theta[d + 1].exp())
}

/// Maximises the marginal log-likelihood with ADAM over
/// `(log σ_f², log l_d, log σ_n²)`, running exactly `cfg.steps` updates.
pub fn optimize_hyperparameters<T: KernelInput>(
    inputs: &[T],
    targets: &[f64],
    init: &Hyperparameters,
    cfg: &OptimizerConfig,
) -> Result<OptimizationOutcome> {
    if !(init.noise > 0.0) {
        return Err(Error::InvalidHyperparameters(
            "noise must be strictly positive to optimise in log space".into(),
        ));
    }
    let initial_mll = log_marginal_likelihood(inputs, targets, init)?;
    if !initial_mll.is_finite() {
        return Err(Error::NonFinite("initial marginal likelihood".into()));
    }
    if cfg.steps == 0 {
        return Ok(OptimizationOutcome {
            hyper: init.clone(),
            mll: initial_mll,
            initial_mll,
            steps_taken: 0,
            aborted: None,
        });
    }
    let mut theta = to_log(init);
    let mut m = alloc::vec![0.0; theta.len()];
    let mut v = alloc::vec![0.0; theta.len()];
    let mut best = (initial_mll, init.clone());

    let abort = |best: (f64, Hyperparameters), step: usize, why: String| OptimizationOutcome {
        hyper: best.1,
        mll: best.0,
        initial_mll,
        steps_taken: step,
        aborted: Some(why),
    };

    for step in 0..cfg.steps {
        let current = match from_log(&theta) {
            Ok(h) => h,
            Err(e) => return Ok(abort(best, step, format!("step {step}: {e}"))),
        };
        let (value, grad) = match log_marginal_likelihood_with_gradient(inputs, targets, &current) {
            Ok(r) => r,
            Err(e) => return Ok(abort(best, step, format!("step {step}: {e}"))),
        };
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Ok(abort(best, step, format!("step {step}: non-finite likelihood or gradient")));
        }
        if value > best.0 {
            best = (value, current);
        }
        let t = (step + 1) as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        for (((th, g), mi), vi) in theta.iter_mut().zip(&grad).zip(&mut m).zip(&mut v) {
            *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * g;
            *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * g * g;
            // Ascent: we maximise the likelihood.
            *th += cfg.learning_rate * (*mi / c1) / ((*vi / c2).sqrt() + cfg.epsilon);
        }
    }

    let final_hyper = match from_log(&theta) {
        Ok(h) => h,
        Err(e) => return Ok(abort(best, cfg.steps, format!("final parameters: {e}"))),
    };
    match log_marginal_likelihood(inputs, targets, &final_hyper) {
        Ok(mll) if mll.is_finite() => Ok(OptimizationOutcome {
            hyper: final_hyper,
            mll,
            initial_mll,
            steps_taken: cfg.steps,
            aborted: None,
        }),
        Ok(_) => Ok(abort(best, cfg.steps, "final likelihood is not finite".into())),
        Err(e) => Ok(abort(best, cfg.steps, format!("final parameters: {e}"))),
    }
}
