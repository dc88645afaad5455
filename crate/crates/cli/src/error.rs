use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_BUG: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        source: ckptsel::Error,
    },

    #[error("{}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] ckptsel::Error),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("all {rows} rows failed")]
    AllRowsFailed { rows: usize, code: u8 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(ckptsel::Error::BudgetExceeded { .. }) => EXIT_BUDGET,
            CliError::Invariant(_) => EXIT_BUG,
            CliError::AllRowsFailed { code, .. } => *code,
            _ => EXIT_USAGE,
        }
    }
}

/// Attaches the offending flags to a parameter error.
pub fn flag(flags: &'static str) -> impl Fn(ckptsel::Error) -> CliError {
    move |e| CliError::Usage(format!("{flags}: {e}"))
}

pub fn input(path: &std::path::Path) -> impl Fn(ckptsel::Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.to_path_buf(),
        source,
    }
}
