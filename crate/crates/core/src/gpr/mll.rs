use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use super::kernel::{weighted_lengthscale_grad, KernelInput};
use super::model::{factorize, mean, validate_training, Hyperparameters};
use crate::Result;

/// `log p(y | X) = -½ y_cᵀ α - Σ log L_ii - (n/2) log 2π` on centred targets.
pub fn log_marginal_likelihood<T: KernelInput>(inputs: &[T], targets: &[f64], hyper: &Hyperparameters) -> Result<f64> {
    validate_training(inputs, targets, hyper)?;
    let prepared = hyper.kernel.prepare();
    let (_, chol, _) = factorize(inputs, hyper, &prepared)?;
    let ybar = mean(targets);
    let yc: Vec<f64> = targets.iter().map(|y| y - ybar).collect();
    let alpha = chol.solve(&yc);
    Ok(mll_value(&yc, &alpha, chol.half_log_det()))
}

fn mll_value(yc: &[f64], alpha: &[f64], half_log_det: f64) -> f64 {
    let fit: f64 = yc.iter().zip(alpha).map(|(a, b)| a * b).sum();
    -0.5 * fit - half_log_det - 0.5 * yc.len() as f64 * (2.0 * PI).ln()
}

/// Marginal log-likelihood and its gradient with respect to the
/// log-parameters, ordered `[log σ_f², log l_1, …, log l_D, log σ_n²]`.
///
/// Uses `∂MLL/∂θ = ½ tr((α αᵀ - A⁻¹) ∂A/∂θ)` with `A = K + σ_n² I`. Jitter added
/// during factorisation is treated as a constant.
pub fn log_marginal_likelihood_with_gradient<T: KernelInput>(
    inputs: &[T],
    targets: &[f64],
    hyper: &Hyperparameters,
) -> Result<(f64, Vec<f64>)> {
    validate_training(inputs, targets, hyper)?;
    let prepared = hyper.kernel.prepare();
    let (k, chol, _) = factorize(inputs, hyper, &prepared)?;
    let ybar = mean(targets);
    let yc: Vec<f64> = targets.iter().map(|y| y - ybar).collect();
    let alpha = chol.solve(&yc);
    let value = mll_value(&yc, &alpha, chol.half_log_det());

    let n = inputs.len();
    let inv = chol.inverse();
    let w = |i: usize, j: usize| alpha[i] * alpha[j] - inv.get(i, j);

    let mut grad = Vec::with_capacity(hyper.dim() + 2);
    let mut g_scale = 0.0;
    let mut trace = 0.0;
    for i in 0..n {
        trace += w(i, i);
        for j in 0..n {
            g_scale += w(i, j) * k.get(i, j);
        }
    }
    grad.push(0.5 * g_scale);
    // Upper triangle only: off-diagonal pairs count twice, times the ½.
    let ls = weighted_lengthscale_grad(inputs, &prepared, |i, j| if i == j { 0.5 * w(i, i) } else { w(i, j) });
    grad.extend(ls);
    grad.push(0.5 * hyper.noise * trace);
    Ok((value, grad))
}
