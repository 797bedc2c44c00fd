//! Exit-code discipline: 0 pass, 1 verification failed, 2 invalid input,
//! 3 runtime/solver failure.

use std::fmt;

use ilr_core::IlrError;

pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

pub fn invalid_input(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INVALID_INPUT, message: message.into() }
}

pub fn runtime_failure(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_RUNTIME, message: message.into() }
}

/// Core errors from bad arguments map to exit 2, everything else to exit 3.
pub fn from_core(err: IlrError) -> CliError {
    let code = match err {
        IlrError::InvalidArgument(_)
        | IlrError::DimensionMismatch { .. }
        | IlrError::IndexOutOfRange { .. }
        | IlrError::SupportTooLarge { .. }
        | IlrError::SearchSpaceTooLarge { .. } => EXIT_INVALID_INPUT,
        _ => EXIT_RUNTIME,
    };
    CliError { code, message: err.to_string() }
}
