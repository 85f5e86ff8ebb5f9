use thiserror::Error;

use crate::spectrum::Spectrum;

/// Errors produced by the hgsp library.
#[derive(Debug, Error)]
pub enum HgspError {
    #[error("dimension mismatch: {what} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("dense tensor of {requested} scalars exceeds the cap of {cap}")]
    SizeCapExceeded { requested: u128, cap: usize },

    #[error("tensor is not super-symmetric: entries {a:?} and {b:?} differ")]
    NotSymmetric { a: Vec<usize>, b: Vec<usize> },

    #[error(
        "power iteration did not converge for component {component} after {restarts} restarts"
    )]
    NotConverged {
        component: usize,
        restarts: usize,
        /// Components accepted before the failure, completed to a full basis.
        partial: Box<Spectrum>,
    },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("ill-conditioned sampling: condition number {cond:e} exceeds {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("spectrum mismatch: {0}")]
    SpectrumMismatch(String),

    #[error("format error in {field}: {message}")]
    Format { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HgspError {
    /// True for errors caused by numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            HgspError::NotConverged { .. }
                | HgspError::DegenerateSpectrum(_)
                | HgspError::IllConditioned { .. }
                | HgspError::Overflow(_)
                | HgspError::Singular(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, HgspError>;

pub(crate) fn check_dim(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(HgspError::DimensionMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}
