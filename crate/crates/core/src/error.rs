use thiserror::Error;

/// Errors raised by the design and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition or type invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A stage of the synthesis pipeline failed.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// The input lies outside the validity region of a closed-form model.
    #[error("outside model validity: {0}")]
    OutsideValidity(String),

    /// Adaptive quadrature could not meet its tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// An iterative solver ran out of iterations.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A root or minimum is not bracketed by the search interval.
    #[error("{0}")]
    NotBracketed(String),

    /// A network evaluation hit a singular denominator.
    #[error("singular network: {0}")]
    Singular(String),

    /// Every point of a sweep was singular.
    #[error("no valid points in sweep")]
    NoValidPoints,

    /// Geometry validation failed during layout.
    #[error("geometry: {0}")]
    Geometry(String),

    /// Every Monte Carlo sample failed.
    #[error("all {0} tolerance samples failed")]
    AllSamplesFailed(usize),

    /// A text document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, looking through any stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
