//! Command-line front end: deck runner and interactive session.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::Parser;

use crate::charset::Charset;
use crate::error::RecError;
use crate::iosys::{InputUnit, LineSink, LineSource, OutputUnit, Record};
use crate::session::{Session, SessionConfig};

/// Exit status for unreadable input or a failed output device.
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "reca", version, about = "REC/A compiler and interpreter")]
pub struct Cli {
    /// Deck file to run; omit (or pass -i) for an interactive session.
    pub deck: Option<PathBuf>,

    /// Read source from the terminal, one card per line.
    #[arg(short, long, conflicts_with = "deck")]
    pub interactive: bool,

    /// Printer line width.
    #[arg(long, default_value_t = 120, value_parser = parse_width)]
    pub width: usize,

    /// Start with source echo off.
    #[arg(long)]
    pub no_echo: bool,

    /// Interrupt any program after this many operations.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_steps: Option<u64>,

    /// Write punch output (unit 2) to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub punch: Option<PathBuf>,

    /// Print the object listing of every compiled program.
    #[arg(long)]
    pub listing_always: bool,

    /// Reject input characters outside the repertoire instead of blanking them.
    #[arg(long)]
    pub strict_charset: bool,

    /// Host character standing in for the cent sign.
    #[arg(long, default_value_t = '¢')]
    pub cent: char,

    /// Host character standing in for the logical-not sign.
    #[arg(long, default_value_t = '~')]
    pub not: char,
}

fn parse_width(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(w @ (80 | 120)) => Ok(w),
        _ => Err("width must be 80 or 120".into()),
    }
}

impl Cli {
    pub fn config(&self) -> Result<SessionConfig, String> {
        let charset = Charset::new(self.cent, self.not)
            .map_err(|e| e.to_string())?
            .strict(self.strict_charset);
        Ok(SessionConfig {
            echo: !self.no_echo,
            printer_width: self.width,
            max_steps: self.max_steps,
            listing_always: self.listing_always,
            charset,
            punch_separate: self.punch.is_some(),
        })
    }
}

/// Sends the typewriter and printer to one stream and punch output to a
/// file, or to the same stream tagged `[punch]`.
pub struct StdSinks<W: Write> {
    out: W,
    punch: Option<Box<dyn Write>>,
}

impl<W: Write> StdSinks<W> {
    pub fn new(out: W, punch: Option<Box<dyn Write>>) -> Self {
        StdSinks { out, punch }
    }

    pub fn flush(&mut self) -> io::Result<()> {
        if let Some(p) = self.punch.as_mut() {
            p.flush()?;
        }
        self.out.flush()
    }
}

impl<W: Write> LineSink for StdSinks<W> {
    fn record(&mut self, unit: OutputUnit, record: Record) -> io::Result<()> {
        match (unit, record) {
            (OutputUnit::Punch, Record::Line(s)) => match self.punch.as_mut() {
                Some(p) => writeln!(p, "{s}"),
                None => writeln!(self.out, "[punch] {s}"),
            },
            (_, Record::Line(s)) => writeln!(self.out, "{s}"),
            (_, Record::PageEject) => writeln!(self.out, "\u{c}"),
        }
    }
}

fn open_punch(path: Option<&Path>) -> io::Result<Option<Box<dyn Write>>> {
    match path {
        Some(p) => Ok(Some(Box::new(BufWriter::new(File::create(p)?)))),
        None => Ok(None),
    }
}

fn install_interrupt(flag: Arc<AtomicBool>) {
    if let Err(e) = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst)) {
        eprintln!("reca: interrupt handler unavailable: {e}");
    }
}

fn finish<W: Write>(
    mut session: Session<StdSinks<W>>,
    result: Result<crate::SessionSummary, RecError>,
) -> i32 {
    for w in session.take_input_warnings() {
        eprintln!("reca: warning: {w}");
    }
    let flushed = session.sink_mut().flush();
    match (result, flushed) {
        (Ok(summary), Ok(())) => summary.exit_code(),
        (Err(e), _) => {
            eprintln!("reca: {e}");
            EXIT_IO
        }
        (_, Err(e)) => {
            eprintln!("reca: {e}");
            EXIT_IO
        }
    }
}

/// Runs a deck file; the keyboard unit reads stdin.
pub fn run_deck(path: &Path, config: SessionConfig, punch: Option<&Path>) -> i32 {
    let deck = match File::open(path) {
        Ok(f) => BufReader::new(f),
        Err(e) => {
            eprintln!("reca: {}: {e}", path.display());
            return EXIT_IO;
        }
    };
    let punch = match open_punch(punch) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("reca: punch file: {e}");
            return EXIT_IO;
        }
    };
    let mut session = Session::new(StdSinks::new(io::stdout().lock(), punch), config);
    session.attach_cards(LineSource::new(deck));
    session.attach_keyboard(LineSource::new(io::stdin().lock()));
    install_interrupt(session.cancel_flag());
    let result = session.run();
    finish(session, result)
}

/// Interactive session: stdin is the keyboard unit and the selected input.
/// A pending interrupt is dropped whenever a new line is requested.
pub fn repl(config: SessionConfig, punch: Option<&Path>) -> i32 {
    let punch = match open_punch(punch) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("reca: punch file: {e}");
            return EXIT_IO;
        }
    };
    let mut session = Session::new(StdSinks::new(io::stdout(), punch), config);
    let flag = session.cancel_flag();
    install_interrupt(Arc::clone(&flag));
    let tty = io::stdin().is_terminal();
    let keyboard = LineSource::new(io::stdin().lock()).with_prompt(move || {
        flag.store(false, Ordering::SeqCst);
        if tty {
            let _ = io::stdout().flush();
            eprint!("rec> ");
            let _ = io::stderr().flush();
        }
    });
    session.attach_keyboard(keyboard);
    session.select_input(InputUnit::Keyboard);
    let result = session.run();
    finish(session, result)
}

pub fn main_with(cli: Cli) -> i32 {
    let config = match cli.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("reca: {e}");
            return EXIT_IO;
        }
    };
    match (&cli.deck, cli.interactive) {
        (Some(path), false) => run_deck(path, config, cli.punch.as_deref()),
        _ => repl(config, cli.punch.as_deref()),
    }
}
