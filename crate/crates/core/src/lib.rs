//! Exact Gaussian-process-regression surrogates for interatomic potentials.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the numerical side
//! of the workbench:
//!
//! - [`repcore`]: Coulomb-matrix and SOAP feature representations.
//! - [`gpr`]: ARD squared-exponential kernels, exact GPR fitting and prediction,
//!   marginal-likelihood optimisation and cross-validated initial guesses.
//! - [`uq`]: predictive distributions from the GPR standard deviation, the
//!   two-set estimator and bootstrap aggregation.
//! - [`calib`]: calibration curves and extended reliability diagrams.
//! - [`al`]: pool-based uncertainty sampling with random and oracle baselines.
//! - [`data`]: datasets, splits and synthetic fixtures.
//!
//! File formats, the command-line interface and anything else touching the
//! operating system live in the `mlip-uq` companion crate.
#![no_std]

extern crate alloc;


pub mod al;
pub mod calib;
pub mod data;
pub mod error;
pub mod gpr;
pub mod linalg;
mod par;
pub mod repcore;
pub mod rng;
pub mod selfcheck;
pub mod uq;

pub use error::{Error, Result};
