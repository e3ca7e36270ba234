use thiserror::Error;

/// Failure classes with their process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<pfmm::Error> for CliError {
    fn from(e: pfmm::Error) -> Self {
        use pfmm::Error::*;
        let msg = e.to_string();
        match e {
            Singular(_) | SupportOverlap(_) | InsideSupport(_) | RepeatedPoints(_) | Degenerate(_) | NonFinite { .. }
            | DegreeCap { .. } => CliError::Numerical(msg),
            Disagreement(_) => CliError::Verification(msg),
            MixedScalar | ExactUnavailable(_) | NonSquare { .. } | Dimension(_) | Parity(_) | OutsideBox(_)
            | Unsupported(_) | InvalidArgument(_) => CliError::Config(msg),
        }
    }
}
