use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or out-of-range configuration, or an unusable
    /// output location.
    Config(String),
    /// A computation failed on a valid configuration.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ajm_core::Error> for CliError {
    fn from(e: ajm_core::Error) -> Self {
        use ajm_core::Error as E;
        match e {
            E::Domain(_) | E::Precondition(_) | E::Config(_) => CliError::Config(e.to_string()),
            E::Build { .. }
            | E::Quadrature { .. }
            | E::NonFinite { .. }
            | E::ZeroProbability { .. }
            | E::NonConvergence { .. }
            | E::InvalidEffect { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
