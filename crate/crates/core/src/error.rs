use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("fiber mismatch: {0}")]
    FiberMismatch(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unknown grid label `{0}`")]
    UnknownLabel(String),

    #[error("element is not self-adjoint (‖a - a*‖₁ = {0:e})")]
    NotSelfAdjoint(f64),

    #[error("represented matrix fails Hermiticity: defect {0:e}")]
    HermiticityDefect(f64),

    #[error("degree violation: expected degree {expected}, product landed in {found}")]
    DegreeViolation { expected: String, found: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{field}: {message}")]
    Parse { field: String, message: String },

    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn check_rank(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::RankMismatch { expected, found })
    }
}
