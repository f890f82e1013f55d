use thiserror::Error;

/// Everything that can go wrong inside the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("illegal commutation of {axis} annuli {index} and {next}: marking pairs interleave")]
    IllegalCommutation { axis: &'static str, index: usize, next: usize },

    #[error("no destabilization at row {row}, column {col}: {reason}")]
    NotDestabilizable { row: usize, col: usize, reason: String },

    #[error("Alexander grading is not integral (grid has {components} components)")]
    NonIntegralAlexander { components: usize },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("sign constraints are unsatisfiable (violated constraint #{constraint}: {detail})")]
    UnsatisfiableSigns { constraint: usize, detail: String },

    #[error("integer overflow: {0}")]
    OverflowGuard(String),

    #[error("tilde homology is not divisible by (1 + q^-1 t^-1)^{power}: {detail}")]
    InexactDivision { power: usize, detail: String },

    #[error("tilde homology has torsion at (m={m}, a={a}); cannot extract the hat groups")]
    TorsionInTilde { m: i32, a: i32 },

    #[error("Euler characteristic is not symmetric under t <-> t^-1: {0}")]
    AsymmetryDetected(String),

    #[error("empty interval: the lower element is not below the upper element")]
    EmptyInterval,

    #[error("{0} requires integer coefficients")]
    NeedsIntegers(&'static str),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = GridError> = std::result::Result<T, E>;

impl GridError {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        GridError::Parse { location: location.into(), message: message.into() }
    }

    /// Coarse classification used by front ends to pick exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            GridError::Parse { .. }
            | GridError::InvalidGrid(_)
            | GridError::IllegalCommutation { .. }
            | GridError::NotDestabilizable { .. }
            | GridError::NonIntegralAlexander { .. }
            | GridError::EmptyInterval
            | GridError::NeedsIntegers(_)
            | GridError::Unsupported(_) => ErrorKind::Validation,
            GridError::ResourceLimit(_) => ErrorKind::Resource,
            GridError::UnsatisfiableSigns { .. }
            | GridError::OverflowGuard(_)
            | GridError::InexactDivision { .. }
            | GridError::TorsionInTilde { .. }
            | GridError::AsymmetryDetected(_) => ErrorKind::Internal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Resource,
    Internal,
}
