//! Exact Gaussian process regression.
//!
//! The covariance is the ARD squared exponential
//! `k(x, x') = σ_f² exp(-½ Σ_d (x_d - x'_d)² / l_d²)`, applied directly to
//! global features or summed over all atom pairs for atomistic ones. Targets are
//! centred on their training mean, which is added back at prediction time.

mod cv;
mod kernel;
mod mll;
mod model;
mod optimize;

pub use cv::{select_initial_guess, CvConfig, CvEntry, CvReport, HyperInit, HyperInitGrid};
pub use kernel::{
    atomistic_kernel_eval, kernel_eval, kernel_matrix, kernel_row, KernelInput, KernelParams,
    PreparedKernel,
};
pub use mll::{log_marginal_likelihood, log_marginal_likelihood_with_gradient};
pub use model::{GprModel, Hyperparameters, STD_CLAMP_TOLERANCE};
pub use optimize::{optimize_hyperparameters, OptimizationOutcome, OptimizerConfig};
