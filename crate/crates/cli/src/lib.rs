//! Library surface of the marssl CLI: configuration, command
//! implementations and the exit-code contract. The binary is a thin clap
//! wrapper around these.

pub mod commands;
pub mod config;

/// Command failure with the exit code it maps to.
///
/// Exit codes: 2 malformed input, 3 fitting failure, 4 shape mismatch,
/// 5 misaligned prediction/truth files.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }

    pub fn input_err(err: impl std::fmt::Display) -> Self {
        Self::new(2, err.to_string())
    }

    pub fn fit(message: impl Into<String>) -> Self {
        Self::new(3, message)
    }

    pub fn fit_err(err: impl std::fmt::Display) -> Self {
        Self::new(3, err.to_string())
    }

    pub fn shape(err: impl std::fmt::Display) -> Self {
        Self::new(4, err.to_string())
    }

    pub fn alignment(err: impl std::fmt::Display) -> Self {
        Self::new(5, err.to_string())
    }
}
