use thiserror::Error;

use crate::expr::ExprError;
use crate::table::TableError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse function: {0}")]
    Function(#[from] ExprError),
    #[error(transparent)]
    Numeric(#[from] qbs_core::Error),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Some verification checks failed; the report has the details.
    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    /// 2 for bad input, 1 for failures while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) | CliError::Function(_) => 2,
            CliError::Numeric(_)
            | CliError::Table(_)
            | CliError::Io(_)
            | CliError::Verification(_) => 1,
        }
    }
}
