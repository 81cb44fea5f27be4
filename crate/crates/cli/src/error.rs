use thiserror::Error;
use vie_core::expr::ParseError;
use vie_core::oracle::OracleError;
use vie_core::picard::PicardError;
use vie_core::polynomialize::PolyError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error("polynomialization failed: {0}")]
    Poly(#[from] PolyError),
    #[error("solve failed: {0}")]
    Solve(#[from] PicardError),
    #[error("oracle failed: {0}")]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Poly(_) => 3,
            CliError::Solve(_) | CliError::Oracle(_) | CliError::Output(_) => 4,
        }
    }
}
