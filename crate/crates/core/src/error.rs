use std::io;

use thiserror::Error;

/// Errors produced anywhere in the NVQ pipeline.
#[derive(Debug, Error)]
pub enum NvqError {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The interval has `x_min == x_max`; non-uniform maps are undefined on it.
    #[error("degenerate interval [{0}, {0}]")]
    DegenerateInterval(f64),

    /// Parameters violate the feasible set of their family.
    #[error("infeasible parameters: {0}")]
    Constraint(String),

    /// The Uniform family has no parameters to fit.
    #[error("uniform quantization has no parameters to fit")]
    NoFitNeeded,

    /// The vector to fit is constant.
    #[error("cannot fit a constant vector")]
    ConstantVector,

    /// The fitness function returned NaN or an infinity.
    #[error("non-finite objective {value} at parameters {params:?}")]
    NonFiniteObjective { value: f64, params: Vec<f64> },

    /// Invalid configuration (bits, subvector counts, sizes, ...).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty dataset")]
    EmptyDataset,

    /// A malformed vector or container file.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl NvqError {
    pub(crate) fn format(offset: u64, message: impl Into<String>) -> Self {
        NvqError::Format {
            offset,
            message: message.into(),
        }
    }
}

pub type Result<T, E = NvqError> = std::result::Result<T, E>;
