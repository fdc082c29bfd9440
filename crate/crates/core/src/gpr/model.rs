use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use super::kernel::{kernel_matrix, kernel_row, KernelInput, KernelParams, PreparedKernel};
use crate::linalg::{Cholesky, Matrix};
use crate::{Error, Result};

/// Negative predictive variances down to `-STD_CLAMP_TOLERANCE · k(x, x)` are
/// treated as rounding noise and clamped to zero.
pub const STD_CLAMP_TOLERANCE: f64 = 1e-10;

/// Kernel parameters plus the observation-noise variance `σ_n²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparameters {
    pub kernel: KernelParams,
    pub noise: f64,
}

impl Hyperparameters {
    pub fn new(kernel: KernelParams, noise: f64) -> Result<Self> {
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(Error::InvalidHyperparameters(format!(
                "noise variance must be non-negative, got {noise}"
            )));
        }
        Ok(Self { kernel, noise })
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }
}

/// Factorises `K(X, X) + σ_n² I`, escalating jitter if needed.
pub(crate) fn factorize<T: KernelInput>(
    inputs: &[T],
    hyper: &Hyperparameters,
    prepared: &PreparedKernel,
) -> Result<(Matrix, Cholesky, f64)> {
    let k = kernel_matrix(inputs, prepared);
    let mut a = k.clone();
    a.add_diagonal(hyper.noise);
    let (chol, jitter) = Cholesky::factor_with_jitter(&a)?;
    Ok((k, chol, jitter))
}

pub(crate) fn validate_training<T: KernelInput>(inputs: &[T], targets: &[f64], hyper: &Hyperparameters) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if inputs.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: inputs.len(),
            right: targets.len(),
        });
    }
    if targets.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite("training target".into()));
    }
    for x in inputs {
        x.check_dim(hyper.dim())?;
    }
    Ok(())
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Trained exact GPR: the Cholesky factor of `K + σ_n² I` and the weights
/// `α = (K + σ_n² I)⁻¹ (y - ȳ)`.
#[derive(Debug, Clone)]
pub struct GprModel<T> {
    inputs: Vec<T>,
    targets: Vec<f64>,
    target_mean: f64,
    hyper: Hyperparameters,
    prepared: PreparedKernel,
    chol: Cholesky,
    jitter: f64,
    weights: Vec<f64>,
}

impl<T: KernelInput> GprModel<T> {
    pub fn fit(inputs: Vec<T>, targets: &[f64], hyper: &Hyperparameters) -> Result<Self> {
        validate_training(&inputs, targets, hyper)?;
        let prepared = hyper.kernel.prepare();
        let (_, chol, jitter) = factorize(&inputs, hyper, &prepared)?;
        let target_mean = mean(targets);
        let centered: Vec<f64> = targets.iter().map(|y| y - target_mean).collect();
        let weights = chol.solve(&centered);
        Ok(Self {
            inputs,
            targets: targets.to_vec(),
            target_mean,
            hyper: hyper.clone(),
            prepared,
            chol,
            jitter,
            weights,
        })
    }

    /// Adds one training sample by extending the Cholesky factor with a new
    /// row instead of refactorising. Falls back to a full refit if the new
    /// pivot is not positive.
    pub fn push_sample(&mut self, x: T, y: f64) -> Result<()> {
        x.check_dim(self.hyper.dim())?;
        if !y.is_finite() {
            return Err(Error::NonFinite("training target".into()));
        }
        let mut row = kernel_row(&x, &self.inputs, &self.prepared);
        row.push(x.covariance(&x, &self.prepared) + self.hyper.noise + self.jitter);
        self.inputs.push(x);
        self.targets.push(y);
        if !self.chol.push_row(&row) {
            let inputs = core::mem::take(&mut self.inputs);
            let targets = core::mem::take(&mut self.targets);
            *self = Self::fit(inputs, &targets, &self.hyper.clone())?;
            return Ok(());
        }
        self.target_mean = mean(&self.targets);
        let centered: Vec<f64> = self.targets.iter().map(|t| t - self.target_mean).collect();
        self.weights = self.chol.solve(&centered);
        Ok(())
    }

    pub fn n_train(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[T] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hyper
    }

    pub fn noise(&self) -> f64 {
        self.hyper.noise
    }

    /// Jitter added on top of `σ_n²` to make the factorisation succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn cholesky(&self) -> &Cholesky {
        &self.chol
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn predict_mean(&self, x: &T) -> Result<f64> {
        x.check_dim(self.hyper.dim())?;
        let k = kernel_row(x, &self.inputs, &self.prepared);
        Ok(self.mean_from_row(&k))
    }

    pub fn predict_std(&self, x: &T) -> Result<f64> {
        x.check_dim(self.hyper.dim())?;
        let k = kernel_row(x, &self.inputs, &self.prepared);
        self.std_from_row(x, &k)
    }

    /// Mean and standard deviation (observation noise excluded) in one pass.
    pub fn predict(&self, x: &T) -> Result<(f64, f64)> {
        x.check_dim(self.hyper.dim())?;
        let k = kernel_row(x, &self.inputs, &self.prepared);
        Ok((self.mean_from_row(&k), self.std_from_row(x, &k)?))
    }

    fn mean_from_row(&self, k: &[f64]) -> f64 {
        k.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.target_mean
    }

    fn std_from_row(&self, x: &T, k: &[f64]) -> Result<f64> {
        let prior = x.covariance(x, &self.prepared);
        let v = self.chol.solve_lower(k);
        let radicand = prior - v.iter().map(|a| a * a).sum::<f64>();
        if radicand >= 0.0 {
            Ok(radicand.sqrt())
        } else if radicand >= -STD_CLAMP_TOLERANCE * prior {
            Ok(0.0)
        } else {
            Err(Error::NegativeVariance { radicand })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn hyper(l: f64, sf2: f64, noise: f64) -> Hyperparameters {
        Hyperparameters::new(KernelParams::new(sf2, vec![l]).unwrap(), noise).unwrap()
    }

    #[test]
    fn single_point_interpolates() {
        let h = hyper(1.0, 1.3, 0.0);
        let m = GprModel::fit(vec![vec![0.4]], &[2.5], &h).unwrap();
        assert_eq!(m.weights(), &[0.0]);
        assert!((m.predict_mean(&vec![0.4]).unwrap() - 2.5).abs() < 1e-12);
        assert!(m.predict_std(&vec![0.4]).unwrap() < 1e-6);
    }

    #[test]
    fn two_point_interpolation_against_direct_solve() {
        let h = hyper(0.7, 1.0, 0.0);
        let xs = [0.0, 3.0];
        let ys = [1.0, -2.0];
        let m = GprModel::fit(xs.iter().map(|&x| vec![x]).collect(), &ys, &h).unwrap();
        // 2×2 oracle: [[1, k], [k, 1]] α = y_c.
        let k = (-0.5 * 9.0 / 0.49f64).exp();
        let yc = [1.5, -1.5];
        let det = 1.0 - k * k;
        let alpha = [(yc[0] - k * yc[1]) / det, (yc[1] - k * yc[0]) / det];
        for i in 0..2 {
            assert!((m.weights()[i] - alpha[i]).abs() < 1e-12);
            assert!((m.predict_mean(&vec![xs[i]]).unwrap() - ys[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn far_query_returns_prior() {
        let h = hyper(0.5, 2.0, 1e-4);
        let xs: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 0.3]).collect();
        let ys = [0.1, 0.5, -0.2, 0.3, 0.9];
        let m = GprModel::fit(xs, &ys, &h).unwrap();
        let far = vec![1e6];
        let mean = ys.iter().sum::<f64>() / 5.0;
        assert!((m.predict_mean(&far).unwrap() - mean).abs() < 1e-12);
        assert!((m.predict_std(&far).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn duplicate_inputs_without_noise_need_jitter() {
        let h = hyper(1.0, 1.0, 0.0);
        let m = GprModel::fit(vec![vec![1.0], vec![1.0]], &[0.0, 1.0], &h).unwrap();
        assert!(m.jitter() > 0.0);
    }

    #[test]
    fn push_sample_matches_full_refit() {
        let h = hyper(0.8, 1.2, 1e-3);
        let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![(i as f64 * 0.77).sin() * 3.0]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0].cos()).collect();
        let mut inc = GprModel::fit(xs[..5].to_vec(), &ys[..5], &h).unwrap();
        for i in 5..8 {
            inc.push_sample(xs[i].clone(), ys[i]).unwrap();
        }
        let full = GprModel::fit(xs.clone(), &ys, &h).unwrap();
        for q in [-2.0, 0.1, 1.7] {
            let (a, b) = (inc.predict(&vec![q]).unwrap(), full.predict(&vec![q]).unwrap());
            assert!((a.0 - b.0).abs() <= 1e-8 * b.0.abs().max(1.0));
            assert!((a.1 - b.1).abs() <= 1e-8 * b.1.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_training_data() {
        let h = hyper(1.0, 1.0, 0.0);
        assert!(matches!(GprModel::<Vec<f64>>::fit(vec![], &[], &h), Err(Error::Empty(_))));
        assert!(GprModel::fit(vec![vec![1.0]], &[1.0, 2.0], &h).is_err());
        assert!(GprModel::fit(vec![vec![1.0, 2.0]], &[1.0], &h).is_err());
        assert!(Hyperparameters::new(KernelParams::new(1.0, vec![1.0]).unwrap(), -1.0).is_err());
    }
}
