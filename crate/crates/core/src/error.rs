use thiserror::Error;

/// Errors produced by the operator, targets, samplers and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the limit of {max} for this operation")]
    TooLarge { dim: usize, max: usize },

    /// The inverse transform left an imaginary part larger than round-off allows.
    /// This indicates a broken transform rather than bad input.
    #[error("imaginary residue {residue:e} exceeds bound {bound:e}")]
    ImaginaryResidue { residue: f64, bound: f64 },

    #[error("component index {index} out of range for {n} components")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("mini-batch is empty")]
    EmptyBatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("target does not provide {0}")]
    UnsupportedTarget(&'static str),

    #[error("chain statistic has zero variance; autocorrelation time is undefined")]
    DegenerateChain,

    #[error("need at least {needed} samples, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
