//! REC/A: a monitor, one-pass threaded-code compiler and interpreter for
//! the REC regular-expression programming language with arithmetic.

pub mod charset;
pub mod cli;
pub mod compiler;
mod error;
pub mod interpreter;
pub mod iosys;
pub mod numio;
pub mod session;
pub mod store;

pub use charset::{a1_of, A1Word, Charset, SixBitCode};
pub use compiler::{CompileCode, DispatchTables, ExecBinding};
pub use error::RecError;
pub use interpreter::{Builtin, RunOutcome, RuntimeState};
pub use iosys::{Deck, ErrorCode, InputUnit, LineSink, OutputUnit, Record, Transcript};
pub use session::{run_deck_text, Session, SessionConfig, SessionSummary};
pub use store::ProgramStore;
