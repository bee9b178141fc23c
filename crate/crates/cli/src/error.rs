use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error at {point}: {source}")]
    Numerical { point: String, source: tflab::Error },
    #[error("hypothesis violated at {point}: {source}")]
    Hypothesis { point: String, source: tflab::Error },
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    /// Wraps a library error, tagging it with the failing sweep point.
    pub fn at(point: impl Into<String>, e: tflab::Error) -> Self {
        let point = point.into();
        match e {
            tflab::Error::Hypothesis(_) => CliError::Hypothesis { point, source: e },
            tflab::Error::Parse(_) | tflab::Error::Io(_) => CliError::Config(format!("{point}: {e}")),
            _ => CliError::Numerical { point, source: e },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Hypothesis { .. } => 4,
        }
    }
}
