use std::io;

use thiserror::Error;

use crate::charset::CharsetError;
use crate::iosys::ErrorCode;

/// Conditions that end a session rather than a single program.
#[derive(Debug, Error)]
pub enum RecError {
    #[error("input exhausted")]
    EndOfInput,
    #[error("terminated by monitor command")]
    Terminated,
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Charset(#[from] CharsetError),
}

/// Why a compile or run stopped early.
#[derive(Debug)]
pub(crate) enum Stop {
    /// A catalog diagnostic; the program is abandoned, the session goes on.
    Diagnostic(ErrorCode),
    Halt(RecError),
}

impl From<RecError> for Stop {
    fn from(e: RecError) -> Self {
        Stop::Halt(e)
    }
}

impl From<io::Error> for Stop {
    fn from(e: io::Error) -> Self {
        Stop::Halt(RecError::Io(e))
    }
}

impl From<ErrorCode> for Stop {
    fn from(code: ErrorCode) -> Self {
        Stop::Diagnostic(code)
    }
}
