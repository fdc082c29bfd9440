use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use crate::linalg::Matrix;
use crate::par::map_range;
use crate::repcore::{AtomisticFeatureSet, GlobalFeature};
use crate::{Error, Result};

/// Output scale `σ_f²` and one length-scale per feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    output_scale: f64,
    lengthscales: Vec<f64>,
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl KernelParams {
    pub fn new(output_scale: f64, lengthscales: Vec<f64>) -> Result<Self> {
        if !positive(output_scale) {
            return Err(Error::InvalidHyperparameters(format!(
                "output scale must be positive, got {output_scale}"
            )));
        }
        if lengthscales.is_empty() {
            return Err(Error::InvalidHyperparameters("no length-scales".into()));
        }
        if let Some(l) = lengthscales.iter().find(|l| !positive(**l)) {
            return Err(Error::InvalidHyperparameters(format!(
                "length-scales must be positive, got {l}"
            )));
        }
        Ok(Self {
            output_scale,
            lengthscales,
        })
    }

    /// The same length-scale replicated over `dim` dimensions.
    pub fn isotropic(output_scale: f64, lengthscale: f64, dim: usize) -> Result<Self> {
        Self::new(output_scale, vec![lengthscale; dim])
    }

    pub fn output_scale(&self) -> f64 {
        self.output_scale
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    pub fn prepare(&self) -> PreparedKernel {
        PreparedKernel {
            output_scale: self.output_scale,
            inv_sq: self.lengthscales.iter().map(|l| 1.0 / (l * l)).collect(),
        }
    }
}

/// [`KernelParams`] with `1/l_d²` precomputed for inner loops.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedKernel {
    output_scale: f64,
    inv_sq: Vec<f64>,
}

impl PreparedKernel {
    pub fn dim(&self) -> usize {
        self.inv_sq.len()
    }

    #[inline]
    pub fn output_scale(&self) -> f64 {
        self.output_scale
    }

    #[inline]
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for ((a, b), w) in x.iter().zip(y).zip(&self.inv_sq) {
            let d = a - b;
            s += d * d * w;
        }
        self.output_scale * (-0.5 * s).exp()
    }

    /// Adds `weight · ∂k/∂log l_d` to `grad[d]` and returns `k`.
    #[inline]
    fn eval_grad(&self, x: &[f64], y: &[f64], weight: f64, grad: &mut [f64]) -> f64 {
        let k = self.eval(x, y);
        let wk = weight * k;
        for (((a, b), w), g) in x.iter().zip(y).zip(&self.inv_sq).zip(grad.iter_mut()) {
            let d = a - b;
            *g += wk * d * d * w;
        }
        k
    }
}

/// Anything the GPR can be trained on.
///
/// Implementations assume dimensions were validated with
/// [`KernelInput::check_dim`] beforehand; the covariance methods do not re-check.
pub trait KernelInput: Clone + Send + Sync {
    fn feature_dim(&self) -> usize;

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.feature_dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.feature_dim(),
            });
        }
        Ok(())
    }

    fn covariance(&self, other: &Self, kernel: &PreparedKernel) -> f64;

    /// Like [`KernelInput::covariance`], additionally accumulating
    /// `weight · ∂k/∂log l_d` into `grad`.
    fn covariance_with_grad(&self, other: &Self, kernel: &PreparedKernel, weight: f64, grad: &mut [f64])
        -> f64;
}

impl KernelInput for Vec<f64> {
    fn feature_dim(&self) -> usize {
        self.len()
    }

    fn covariance(&self, other: &Self, kernel: &PreparedKernel) -> f64 {
        kernel.eval(self, other)
    }

    fn covariance_with_grad(&self, other: &Self, kernel: &PreparedKernel, weight: f64, grad: &mut [f64]) -> f64 {
        kernel.eval_grad(self, other, weight, grad)
    }
}

impl KernelInput for GlobalFeature {
    fn feature_dim(&self) -> usize {
        self.dim()
    }

    fn covariance(&self, other: &Self, kernel: &PreparedKernel) -> f64 {
        kernel.eval(self.values(), other.values())
    }

    fn covariance_with_grad(&self, other: &Self, kernel: &PreparedKernel, weight: f64, grad: &mut [f64]) -> f64 {
        kernel.eval_grad(self.values(), other.values(), weight, grad)
    }
}

impl KernelInput for AtomisticFeatureSet {
    fn feature_dim(&self) -> usize {
        self.dim()
    }

    fn covariance(&self, other: &Self, kernel: &PreparedKernel) -> f64 {
        let mut s = 0.0;
        for a in self.iter() {
            for b in other.iter() {
                s += kernel.eval(a, b);
            }
        }
        s
    }

    fn covariance_with_grad(&self, other: &Self, kernel: &PreparedKernel, weight: f64, grad: &mut [f64]) -> f64 {
        let mut s = 0.0;
        for a in self.iter() {
            for b in other.iter() {
                s += kernel.eval_grad(a, b, weight, grad);
            }
        }
        s
    }
}

/// Squared-exponential ARD covariance between two feature vectors.
pub fn kernel_eval(x: &[f64], y: &[f64], params: &KernelParams) -> Result<f64> {
    for v in [x, y] {
        if v.len() != params.dim() {
            return Err(Error::DimensionMismatch {
                expected: params.dim(),
                found: v.len(),
            });
        }
    }
    Ok(params.prepare().eval(x, y))
}

/// Sum of [`kernel_eval`] over all atom pairs of two environments.
pub fn atomistic_kernel_eval(x: &AtomisticFeatureSet, y: &AtomisticFeatureSet, params: &KernelParams) -> Result<f64> {
    x.check_dim(params.dim())?;
    y.check_dim(params.dim())?;
    Ok(x.covariance(y, &params.prepare()))
}

/// Symmetric matrix `K(X, X)` without any noise term.
pub fn kernel_matrix<T: KernelInput>(inputs: &[T], kernel: &PreparedKernel) -> Matrix {
    let n = inputs.len();
    let rows = map_range(n, |i| {
        (i..n).map(|j| inputs[i].covariance(&inputs[j], kernel)).collect::<Vec<_>>()
    });
    let mut k = Matrix::zeros(n);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            k.set(i, i + off, v);
            k.set(i + off, i, v);
        }
    }
    k
}

/// `K(x, X)`.
pub fn kernel_row<T: KernelInput>(x: &T, inputs: &[T], kernel: &PreparedKernel) -> Vec<f64> {
    inputs.iter().map(|xi| x.covariance(xi, kernel)).collect()
}

/// `Σ_{i≤j} w_ij ∂K_ij/∂log l_d` for all `d`, with `weight(i, j)` supplying `w_ij`.
pub(crate) fn weighted_lengthscale_grad<T: KernelInput>(
    inputs: &[T],
    kernel: &PreparedKernel,
    weight: impl Fn(usize, usize) -> f64 + Sync,
) -> Vec<f64> {
    let n = inputs.len();
    let dim = kernel.dim();
    let partials = map_range(n, |i| {
        let mut g = vec![0.0; dim];
        for j in i..n {
            inputs[i].covariance_with_grad(&inputs[j], kernel, weight(i, j), &mut g);
        }
        g
    });
    let mut total = vec![0.0; dim];
    for g in partials {
        for (t, v) in total.iter_mut().zip(g) {
            *t += v;
        }
    }
    total
}
