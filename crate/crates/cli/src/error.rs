use std::fmt;

pub const SUCCESS: u8 = 0;
pub const NEGATIVE: u8 = 1;
pub const INVALID_INPUT: u8 = 2;
pub const FAILURE: u8 = 3;

/// An error together with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: INVALID_INPUT,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: FAILURE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<sepspec::Error> for CliError {
    fn from(e: sepspec::Error) -> Self {
        use sepspec::Error::*;
        let code = match e {
            Dimension(_)
            | NonFinite
            | NotHermitian { .. }
            | NotUnitary { .. }
            | NotUnit { .. }
            | NotAState(_)
            | UnsupportedDimension { .. } => INVALID_INPUT,
            SpectralCondition { .. } => NEGATIVE,
            NotAdmissible { .. }
            | AlignmentInfeasible { .. }
            | ContractionViolation { .. }
            | LemmaInapplicable { .. }
            | Numerical(_) => FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}
