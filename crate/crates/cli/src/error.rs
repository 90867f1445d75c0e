use std::fmt;

/// Failures that stop a command before a report is written.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, files or map data. Exit code 2.
    Input(String),
    /// A limit did not settle or a finite model degenerated. Exit code 3.
    Numeric(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Numeric(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<outhyp_core::Error> for CliError {
    fn from(e: outhyp_core::Error) -> Self {
        use outhyp_core::Error as E;
        match e {
            E::Input(_) | E::Precondition(_) | E::NotIrreducible => CliError::Input(e.to_string()),
            E::Convergence { .. } | E::Degenerate(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
