//! A REC/A machine: all state shared by the monitor, compiler and
//! interpreter, and the cycle that drives them.

use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use crate::charset::{A1Word, Charset};
use crate::compiler::{CompileExit, ConstPool, DispatchTables, MonitorExit, ParenStack};
use crate::error::RecError;
use crate::interpreter::{RunOutcome, RuntimeState};
use crate::iosys::{
    CardReader, CardSource, Deck, InputUnit, LineSink, LineWriter, Transcript, PRINTER_WIDTH,
};
use crate::store::{check_program, IntegrityError, ProgramStore};

#[derive(Debug, Clone)]
pub struct SessionConfig {
    /// Echo source text while compiling (off is like a leading `*S`).
    pub echo: bool,
    pub printer_width: usize,
    /// Opcode dispatches allowed per run before an interrupt is forced.
    pub max_steps: Option<u64>,
    /// Print the object listing of every program.
    pub listing_always: bool,
    pub charset: Charset,
    /// Punch output goes to its own device rather than the listing stream.
    pub punch_separate: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            echo: true,
            printer_width: PRINTER_WIDTH,
            max_steps: None,
            listing_always: false,
            charset: Charset::default(),
            punch_separate: false,
        }
    }
}

/// How a session ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionSummary {
    /// `T` was read (as opposed to running out of input).
    pub terminated: bool,
    pub programs_run: usize,
    pub diagnostics: usize,
    pub interrupts: usize,
}

impl SessionSummary {
    /// 0 for a clean run, 1 if any diagnostic was printed.
    pub fn exit_code(&self) -> i32 {
        if self.diagnostics > 0 {
            1
        } else {
            0
        }
    }
}

pub struct Session<S> {
    pub(crate) reader: CardReader,
    pub(crate) writer: LineWriter<S>,
    /// The most recently read or written character.
    pub(crate) iac: A1Word,
    pub(crate) store: ProgramStore,
    pub(crate) tables: DispatchTables,
    pub(crate) consts: ConstPool,
    pub(crate) parens: ParenStack,
    pub(crate) runtime: RuntimeState,
    pub(crate) cancel: Arc<AtomicBool>,
    pub(crate) max_steps: Option<u64>,
    pub(crate) steps: u64,
    pub(crate) diagnostics: usize,
    pub(crate) listing_always: bool,
    echo_default: bool,
    programs_run: usize,
    interrupts: usize,
    last_outcome: Option<RunOutcome>,
}

impl<S: LineSink> Session<S> {
    pub fn new(sink: S, config: SessionConfig) -> Session<S> {
        let mut writer = LineWriter::new(sink, config.charset.clone());
        writer.set_printer_width(config.printer_width);
        writer.set_punch_separate(config.punch_separate);
        Session {
            reader: CardReader::new(config.charset),
            writer,
            iac: A1Word::BLANK,
            store: ProgramStore::new(),
            tables: DispatchTables::pristine(),
            consts: ConstPool::default(),
            parens: ParenStack::default(),
            runtime: RuntimeState::default(),
            cancel: Arc::new(AtomicBool::new(false)),
            max_steps: config.max_steps,
            steps: 0,
            diagnostics: 0,
            listing_always: config.listing_always,
            echo_default: config.echo,
            programs_run: 0,
            interrupts: 0,
            last_outcome: None,
        }
    }

    /// Card input (unit 2), the default source.
    pub fn attach_cards(&mut self, source: impl CardSource + 'static) {
        self.reader.attach(InputUnit::Card, Box::new(source));
    }

    /// Keyboard input (unit 6).
    pub fn attach_keyboard(&mut self, source: impl CardSource + 'static) {
        self.reader.attach(InputUnit::Keyboard, Box::new(source));
    }

    pub fn select_input(&mut self, unit: InputUnit) {
        self.reader.select(unit);
    }

    /// Setting this flag interrupts the running program at its next
    /// operation, like data switch 5.
    pub fn cancel_flag(&self) -> Arc<AtomicBool> {
        Arc::clone(&self.cancel)
    }

    pub fn store(&self) -> &ProgramStore {
        &self.store
    }

    pub fn tables(&self) -> &DispatchTables {
        &self.tables
    }

    pub fn constants(&self) -> &ConstPool {
        &self.consts
    }

    pub fn runtime(&self) -> &RuntimeState {
        &self.runtime
    }

    pub fn sink(&self) -> &S {
        self.writer.sink()
    }

    pub fn sink_mut(&mut self) -> &mut S {
        self.writer.sink_mut()
    }

    pub fn into_sink(self) -> S {
        self.writer.into_sink()
    }

    pub fn diagnostics(&self) -> usize {
        self.diagnostics
    }

    pub fn last_outcome(&self) -> Option<RunOutcome> {
        self.last_outcome
    }

    /// Characters read as blank because they are outside the repertoire.
    pub fn take_input_warnings(&mut self) -> Vec<String> {
        self.reader.take_warnings()
    }

    /// Structural check of the program compiled at `origin..end`.
    pub fn check_program(&self, origin: usize, end: usize) -> Result<(), IntegrityError> {
        check_program(&self.store, origin, end, |code| {
            usize::try_from(code)
                .ok()
                .and_then(|c| self.tables.operand_shape(c))
        })
    }

    /// Runs monitor, compile and execute phases until `T` or end of input.
    pub fn run(&mut self) -> Result<SessionSummary, RecError> {
        let terminated = match self.cycle() {
            Ok(()) => true,
            Err(RecError::EndOfInput) => {
                self.writer.flush_line()?;
                false
            }
            Err(e) => {
                let _ = self.writer.flush_line();
                return Err(e);
            }
        };
        Ok(SessionSummary {
            terminated,
            programs_run: self.programs_run,
            diagnostics: self.diagnostics,
            interrupts: self.interrupts,
        })
    }

    fn cycle(&mut self) -> Result<(), RecError> {
        loop {
            self.runtime.reset_stack();
            loop {
                self.store.emit_cursor = self.store.origin;
                self.writer.set_echo(self.echo_default);
                if let MonitorExit::Terminate = self.monitor()? {
                    return Ok(());
                }
                if let CompileExit::Immediate = self.compile()? {
                    break;
                }
            }
            let outcome = self.execute()?;
            self.programs_run += 1;
            if outcome == RunOutcome::Interrupted {
                self.interrupts += 1;
            }
            self.last_outcome = Some(outcome);
        }
    }
}

/// Runs a deck held in memory and returns everything it printed.
pub fn run_deck_text(deck: &str, config: SessionConfig) -> (Transcript, SessionSummary) {
    let mut session = Session::new(Transcript::default(), config);
    session.attach_cards(Deck::new(deck));
    let summary = session
        .run()
        .expect("in-memory decks cannot fail with I/O errors");
    (session.into_sink(), summary)
}
