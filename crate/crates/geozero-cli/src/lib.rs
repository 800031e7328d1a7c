//! Library half of the `geozero` command-line tool: the on-disk system
//! format, report assembly and rendering, and the three-file verification
//! audit.  The binary in `main.rs` is a thin argument-parsing shell over
//! these modules.

pub mod audit;
pub mod report;
pub mod sysfile;

use geozero::error::{Error, ErrorCategory};

/// Exit code for validation problems: unreadable or malformed files, shape
/// mismatches, bad flag values, rank-condition violations.
pub const EXIT_VALIDATION: i32 = 1;

/// Exit code for numerical or pipeline failures.
pub const EXIT_NUMERICAL: i32 = 2;

/// Exit code when a verification check fails.
pub const EXIT_VERIFICATION: i32 = 3;

/// A command failure carrying the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err.category() {
            ErrorCategory::Validation => EXIT_VALIDATION,
            ErrorCategory::Numerical => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}
