use thiserror::Error;

/// Errors raised by the detectors, solvers and I/O helpers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("series too short: got {got} observations, need at least {need}")]
    TooShort { got: usize, need: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("sample too small for the normality test: got {got}, need at least 3")]
    SampleTooSmall { got: usize },

    #[error("sample too large for the normality test: got {got}, at most 5000")]
    SampleTooLarge { got: usize },

    #[error("degenerate sample: all values are identical")]
    DegenerateSample,

    #[error("matrix is not positive definite (pivot {pivot:.3e} at row {row})")]
    Singular { row: usize, pivot: f64 },

    #[error("intervals overlap or are unsorted: {0}")]
    Intervals(String),

    #[error("{0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Singular { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
