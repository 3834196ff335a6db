use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient dimension {0} outside the supported range 1..=12")]
    UnsupportedDimension(usize),

    #[error("grade mismatch: expected {expected}, found {found}")]
    GradeMismatch { expected: usize, found: usize },

    #[error("grade overflow: {k} + {l} exceeds ambient dimension {n}")]
    GradeOverflow { k: usize, l: usize, n: usize },

    #[error("degenerate frame (k-volume {magnitude:e})")]
    DegenerateFrame { magnitude: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point is not on the shape: {0}")]
    NotOnShape(String),

    #[error("shape is not contained in the domain: {0}")]
    ShapeOutsideDomain(String),

    #[error("shape has zero k-dimensional measure")]
    ZeroMeasure,

    #[error(
        "degenerate draw fraction {fraction:e} exceeds the limit {limit:e} \
         ({degenerate} degenerate draws)"
    )]
    TooManyDegenerate {
        fraction: f64,
        limit: f64,
        degenerate: u64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
