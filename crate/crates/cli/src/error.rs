use std::fmt;
use std::process::ExitCode;

use cdseq_core::Error as CoreError;

/// Failure of a command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an inconsistent configuration (exit 2).
    Usage(String),
    /// An input file that cannot be read or parsed (exit 3).
    Input(String),
    /// A numerical failure inside the solvers (exit 4).
    Numerical(String),
    /// Output files could not be written (exit 1).
    Output(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Output(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Numerical(_) => 4,
        })
    }

    pub fn output(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Output(format!("cannot write {}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Schema { .. } => CliError::Input(e.to_string()),
            CoreError::ZeroPolynomial => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
