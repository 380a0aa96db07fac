use std::fmt;

use upslab_core::Error;

pub const EXIT_UNGUARANTEED: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_INCONSISTENT: u8 = 4;
pub const EXIT_BUDGET: u8 = 5;

/// A failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn bad_input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_BAD_INPUT,
            message: message.into(),
        }
    }

    pub fn inconsistent(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INCONSISTENT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GridCapExceeded { .. } | Error::CapExceeded(_) => EXIT_CAP,
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::EnergyResidue { .. } => EXIT_INCONSISTENT,
            _ => EXIT_BAD_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::bad_input(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
