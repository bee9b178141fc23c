use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{routine} failed to converge after {iterations} iterations")]
    Convergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("grid under-resolved: {0}")]
    Underresolved(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("quadrature budget exceeded: estimated entry error {estimate:e} > tolerance {tolerance:e}")]
    QuadratureBudget { estimate: f64, tolerance: f64 },

    #[error("basis size {0} outside supported range 1..={1}")]
    BasisSize(usize, usize),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid does not cover the required region: {0}")]
    GridCoverage(String),

    #[error("unsupported window: {0}")]
    UnsupportedWindow(String),

    #[error("memory budget exceeded: {0}")]
    MemoryBudget(String),

    #[error("spectrum left [0, 1] by {excess:e} (tolerance {tolerance:e})")]
    SpectrumRange { excess: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for violated theorem hypotheses (as opposed to numerical trouble).
    pub fn is_hypothesis(&self) -> bool {
        matches!(self, Error::Hypothesis(_))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
