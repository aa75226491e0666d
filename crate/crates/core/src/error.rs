use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the scattering library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid plate: {0}")]
    InvalidPlate(String),

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch { expected: Vec<usize>, actual: Vec<usize> },

    #[error("translation offset {offset:?} out of range for {samples:?} samples per axis")]
    OffsetOutOfRange { offset: Vec<i64>, samples: Vec<usize> },

    #[error("translation {0:?} is not an integer multiple of the sample spacing")]
    MisalignedShift(Vec<f64>),

    #[error("translated plate does not contain the origin (shift {0:?})")]
    OriginOutsidePlate(Vec<f64>),

    #[error("grid shape {shape:?} is not divisible by {divisor} on every axis")]
    Indivisible { shape: Vec<usize>, divisor: String },

    #[error("invalid filter bank parameters: {0}")]
    InvalidBank(String),

    #[error("partition does not belong to the signal's plate")]
    PartitionMismatch,

    #[error("pooling factor {factor} is not admissible: threshold is {threshold}")]
    Inadmissible { factor: f64, threshold: f64 },

    #[error("pooling factor must be >= 1, got {0}")]
    InvalidFactor(f64),

    #[error("operation undefined for the zero signal: {0}")]
    ZeroSignal(&'static str),

    #[error("at depth {depth}: {source}")]
    AtDepth {
        depth: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no low-pass filter available for grid {0:?}")]
    NoLowPass(Vec<usize>),

    #[error("malformed {format} data: {message}")]
    Format { format: &'static str, message: String },

    #[error("{check} precondition violated: {message}")]
    Precondition { check: &'static str, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_depth(depth: usize, err: Error) -> Self {
        match err {
            e @ Error::AtDepth { .. } => e,
            e => Error::AtDepth {
                depth,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
