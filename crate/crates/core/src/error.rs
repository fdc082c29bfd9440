use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("degenerate geometry: atoms {first} and {second} are {distance:e} Å apart")]
    DegenerateGeometry {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),

    #[error("kernel matrix not positive definite even with jitter {jitter:e}")]
    Conditioning { jitter: f64 },

    #[error("predictive variance {radicand:e} is negative beyond rounding tolerance")]
    NegativeVariance { radicand: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("insufficient samples: need {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("active-learning invariant violated: {0}")]
    Invariant(String),
}
