use std::fmt;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SAMPLER: i32 = 3;

/// A failure carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn sampler(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_SAMPLER,
            message: message.into(),
        }
    }

    pub fn context(self, what: impl fmt::Display) -> Self {
        CliError {
            code: self.code,
            message: format!("{what}: {}", self.message),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<glt_core::Error> for CliError {
    fn from(e: glt_core::Error) -> Self {
        use glt_core::Error::*;
        match e {
            Aborted { .. } | Factorization | InvalidState(_) | DegenerateMass { .. } | NonConvergence { .. } => {
                CliError::sampler(e.to_string())
            }
            Domain { .. } | InsufficientDraws { .. } | Structure(_) | DegenerateColumn(_) | Dimension(_) => {
                CliError::input(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
