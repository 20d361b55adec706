//! Card-image input, buffered line output and the diagnostic catalog.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, BufRead};

use crate::charset::{translate_keypunch, A1Word, Charset};
use crate::error::RecError;

pub const CARD_COLUMNS: usize = 80;
pub const PRINTER_WIDTH: usize = 120;

/// A supplier of card images, one text line per card.
pub trait CardSource {
    fn next_card(&mut self) -> io::Result<Option<String>>;
}

/// Cards held in memory.
#[derive(Debug, Default, Clone)]
pub struct Deck {
    cards: VecDeque<String>,
}

impl Deck {
    pub fn new(text: &str) -> Deck {
        Deck {
            cards: text.lines().map(str::to_owned).collect(),
        }
    }

    pub fn push(&mut self, card: impl Into<String>) {
        self.cards.push_back(card.into());
    }

    pub fn remaining(&self) -> usize {
        self.cards.len()
    }
}

impl CardSource for Deck {
    fn next_card(&mut self) -> io::Result<Option<String>> {
        Ok(self.cards.pop_front())
    }
}

/// Cards read lazily from any buffered reader (a file or a terminal).
pub struct LineSource<R> {
    reader: R,
    prompt: Option<Box<dyn FnMut()>>,
}

impl<R: BufRead> LineSource<R> {
    pub fn new(reader: R) -> Self {
        LineSource {
            reader,
            prompt: None,
        }
    }

    /// Called before each card is requested; used for interactive prompts.
    pub fn with_prompt(mut self, prompt: impl FnMut() + 'static) -> Self {
        self.prompt = Some(Box::new(prompt));
        self
    }
}

impl<R: BufRead> CardSource for LineSource<R> {
    fn next_card(&mut self) -> io::Result<Option<String>> {
        if let Some(prompt) = self.prompt.as_mut() {
            prompt();
        }
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        while line.ends_with(['\n', '\r']) {
            line.pop();
        }
        Ok(Some(line))
    }
}

/// Input unit numbers as the monitor `I` command understands them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputUnit {
    /// Card reader or deck file; keypunch graphics are translated.
    Card = 2,
    Keyboard = 6,
}

/// 80-column input buffer over one of two attached sources.
pub struct CardReader {
    record: [A1Word; CARD_COLUMNS],
    /// 1-based column of the next character; above 80 forces a refill.
    cursor: usize,
    unit: InputUnit,
    cards: Option<Box<dyn CardSource>>,
    keyboard: Option<Box<dyn CardSource>>,
    charset: Charset,
    warnings: Vec<String>,
    cards_read: usize,
}

impl fmt::Debug for CardReader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CardReader")
            .field("cursor", &self.cursor)
            .field("unit", &self.unit)
            .field("cards_read", &self.cards_read)
            .finish_non_exhaustive()
    }
}

impl CardReader {
    pub fn new(charset: Charset) -> CardReader {
        CardReader {
            record: [A1Word::BLANK; CARD_COLUMNS],
            cursor: CARD_COLUMNS + 1,
            unit: InputUnit::Card,
            cards: None,
            keyboard: None,
            charset,
            warnings: Vec::new(),
            cards_read: 0,
        }
    }

    pub fn attach(&mut self, unit: InputUnit, source: Box<dyn CardSource>) {
        match unit {
            InputUnit::Card => self.cards = Some(source),
            InputUnit::Keyboard => self.keyboard = Some(source),
        }
    }

    pub fn select(&mut self, unit: InputUnit) {
        self.unit = unit;
    }

    pub fn unit(&self) -> InputUnit {
        self.unit
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Makes the next read start a fresh card.
    pub fn force_refill(&mut self) {
        self.cursor = CARD_COLUMNS + 1;
    }

    pub fn charset(&self) -> &Charset {
        &self.charset
    }

    /// Characters that were blanked because they are outside the repertoire.
    pub fn take_warnings(&mut self) -> Vec<String> {
        std::mem::take(&mut self.warnings)
    }

    fn refill(&mut self) -> Result<(), RecError> {
        let source = match self.unit {
            InputUnit::Card => self.cards.as_mut(),
            InputUnit::Keyboard => self.keyboard.as_mut(),
        };
        let line = match source {
            Some(source) => source.next_card()?,
            None => None,
        };
        let line = line.ok_or(RecError::EndOfInput)?;
        self.cards_read += 1;
        self.record = [A1Word::BLANK; CARD_COLUMNS];
        for (column, c) in line.chars().take(CARD_COLUMNS).enumerate() {
            let (word, known) = self.charset.encode(c)?;
            if !known {
                self.warnings.push(format!(
                    "card {}, column {}: {:?} read as blank",
                    self.cards_read,
                    column + 1,
                    c
                ));
            }
            self.record[column] = word;
        }
        self.cursor = 1;
        Ok(())
    }

    /// Next character, refilling from the active unit when the card is spent.
    pub fn read_char(&mut self) -> Result<A1Word, RecError> {
        if self.cursor > CARD_COLUMNS {
            self.refill()?;
        }
        let mut w = self.record[self.cursor - 1];
        if self.unit == InputUnit::Card {
            w = translate_keypunch(w);
        }
        self.cursor += 1;
        Ok(w)
    }
}

/// Output unit numbers as the monitor `O` command understands them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputUnit {
    Typewriter = 1,
    Punch = 2,
    Printer = 3,
}

impl OutputUnit {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Line(String),
    /// Skip to a new page (printer only).
    PageEject,
}

/// Receives finished output records.
pub trait LineSink {
    fn record(&mut self, unit: OutputUnit, record: Record) -> io::Result<()>;
}

/// In-memory sink keeping every record in order.
#[derive(Debug, Default, Clone)]
pub struct Transcript {
    pub records: Vec<(OutputUnit, Record)>,
}

impl Transcript {
    /// Text lines on all units, page ejects dropped.
    pub fn lines(&self) -> Vec<&str> {
        self.records
            .iter()
            .filter_map(|(_, r)| match r {
                Record::Line(s) => Some(s.as_str()),
                Record::PageEject => None,
            })
            .collect()
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for line in self.lines() {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }
}

impl LineSink for Transcript {
    fn record(&mut self, unit: OutputUnit, record: Record) -> io::Result<()> {
        self.records.push((unit, record));
        Ok(())
    }
}

/// Fixed diagnostic catalog, addressed by the negated error flag.
pub const MESSAGES: [&str; 20] = [
    "COMP 01 EXCESS NESTING",
    "COMP 02 PROGRAM LENGTH EXCEEDS CAPACITY",
    "EXEC 01 EXCESSIVE RECURSION",
    "EXEC 02 EMPTY PUSHDOWN LIST",
    "EXEC 03 PUSHDOWN LIST OVERFLOW",
    "COMP 03 ILLEGAL ARGUMENT",
    "COMP 04 ILLEGAL CHARACTER ON PARENTHESIS LEVEL ZERO",
    "COMP 05 NEGATIVE OR ZERO COUNTER",
    "SUP 01 ILLEGAL I/O UNIT NUMBER",
    "COMP 06 PROGRAM DEFINED CONSTANT EXCESS",
    "CONV 01 SYNTAX ERROR IN NUMERIC DATA",
    "EXEC 04 RECURSIVE SUBROUTINE NOT DEFINED",
    "EXEC 05 UNDEFINED NONRECURSIVE SUBROUTINE",
    "REC 01 UNUSED",
    "COMP 07 REC/3150 OPERATOR",
    "REC 02 UNUSED",
    "REC 03 UNUSED",
    "REC 04 UNUSED",
    "REC 05 UNUSED",
    "REC 06 UNUSED",
];

/// Catalog entry for error flag `code` (-1..=-20).
pub fn message(code: i32) -> Option<&'static str> {
    let index = usize::try_from(-code).ok()?;
    MESSAGES.get(index.checked_sub(1)?).copied()
}

/// Every condition that aborts a phase and prints a diagnostic line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    ExcessNesting,
    ProgramTooLong,
    ExcessiveRecursion,
    EmptyPushdown,
    PushdownOverflow,
    IllegalArgument,
    StrayCharacter,
    BadCounter,
    IllegalUnit,
    ConstantExcess,
    NumericSyntax,
    RecursiveUndefined,
    Undefined,
    CdcOperator,
    /// Non-finite arithmetic result (square root or log of a negative,
    /// division by zero, overflow). Not part of the original catalog.
    ArithmeticFault,
    /// Execution left the program store. Not part of the original catalog.
    AddressFault,
}

impl ErrorCode {
    /// The original negative error flag, for catalog entries.
    pub fn flag(self) -> Option<i32> {
        use ErrorCode::*;
        Some(match self {
            ExcessNesting => -1,
            ProgramTooLong => -2,
            ExcessiveRecursion => -3,
            EmptyPushdown => -4,
            PushdownOverflow => -5,
            IllegalArgument => -6,
            StrayCharacter => -7,
            BadCounter => -8,
            IllegalUnit => -9,
            ConstantExcess => -10,
            NumericSyntax => -11,
            RecursiveUndefined => -12,
            Undefined => -13,
            CdcOperator => -15,
            ArithmeticFault | AddressFault => return None,
        })
    }

    pub fn from_flag(flag: i32) -> Option<ErrorCode> {
        use ErrorCode::*;
        Some(match flag {
            -1 => ExcessNesting,
            -2 => ProgramTooLong,
            -3 => ExcessiveRecursion,
            -4 => EmptyPushdown,
            -5 => PushdownOverflow,
            -6 => IllegalArgument,
            -7 => StrayCharacter,
            -8 => BadCounter,
            -9 => IllegalUnit,
            -10 => ConstantExcess,
            -11 => NumericSyntax,
            -12 => RecursiveUndefined,
            -13 => Undefined,
            -15 => CdcOperator,
            _ => return None,
        })
    }

    pub fn message(self) -> &'static str {
        match self {
            ErrorCode::ArithmeticFault => "EXEC 06 ARITHMETIC FAULT",
            ErrorCode::AddressFault => "EXEC 07 TRANSFER OUTSIDE PROGRAM AREA",
            other => message(other.flag().unwrap_or(0)).unwrap_or("REC 00 UNKNOWN"),
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

/// Buffered output line with echo suppression and width-triggered flushing.
pub struct LineWriter<S> {
    line: Vec<A1Word>,
    unit: OutputUnit,
    echo: bool,
    printer_width: usize,
    charset: Charset,
    sink: S,
    punch_separate: bool,
}

impl<S: LineSink> LineWriter<S> {
    pub fn new(sink: S, charset: Charset) -> Self {
        LineWriter {
            line: Vec::with_capacity(PRINTER_WIDTH),
            unit: OutputUnit::Printer,
            echo: true,
            printer_width: PRINTER_WIDTH,
            charset,
            sink,
            punch_separate: false,
        }
    }

    pub fn sink(&self) -> &S {
        &self.sink
    }

    pub fn sink_mut(&mut self) -> &mut S {
        &mut self.sink
    }

    pub fn into_sink(self) -> S {
        self.sink
    }

    pub fn unit(&self) -> OutputUnit {
        self.unit
    }

    pub fn select(&mut self, unit: OutputUnit) {
        self.unit = unit;
    }

    /// Printer line length; other units always hold 80 columns.
    pub fn set_printer_width(&mut self, width: usize) {
        self.printer_width = width.clamp(1, PRINTER_WIDTH);
    }

    pub fn echo(&self) -> bool {
        self.echo
    }

    pub fn set_echo(&mut self, on: bool) {
        self.echo = on;
    }

    /// Declares whether punch output goes to its own device. When it does,
    /// diagnostics written to the punch are also shown on the console.
    pub fn set_punch_separate(&mut self, separate: bool) {
        self.punch_separate = separate;
    }

    pub fn cursor(&self) -> usize {
        self.line.len()
    }

    pub fn width(&self) -> usize {
        match self.unit {
            OutputUnit::Printer => self.printer_width,
            _ => CARD_COLUMNS,
        }
    }

    pub fn charset(&self) -> &Charset {
        &self.charset
    }

    pub fn put_char(&mut self, c: A1Word) -> io::Result<()> {
        if !self.echo {
            return Ok(());
        }
        self.line.push(c);
        if self.line.len() >= self.width() {
            self.flush_line()?;
        }
        Ok(())
    }

    pub fn flush_line(&mut self) -> io::Result<()> {
        if self.line.is_empty() {
            return Ok(());
        }
        let text = self.charset.decode_all(&self.line);
        self.line.clear();
        self.sink.record(self.unit, Record::Line(text))
    }

    /// Drops the pending line without printing it.
    pub fn discard(&mut self) {
        self.line.clear();
    }

    /// Writes a line straight to the current unit, bypassing the buffer.
    pub fn write_direct(&mut self, text: String) -> io::Result<()> {
        self.sink.record(self.unit, Record::Line(text))
    }

    pub fn emit_message(&mut self, code: ErrorCode) -> io::Result<()> {
        self.write_direct(code.message().to_owned())
    }

    /// Interrupt notices go to the console as well as the current unit.
    pub fn console_notice(&mut self, text: &str) -> io::Result<()> {
        if self.unit == OutputUnit::Punch && self.punch_separate {
            self.sink
                .record(OutputUnit::Typewriter, Record::Line(text.to_owned()))?;
        }
        self.write_direct(text.to_owned())
    }

    pub fn page_eject(&mut self) -> io::Result<()> {
        if self.unit == OutputUnit::Printer {
            self.sink.record(OutputUnit::Printer, Record::PageEject)?;
        }
        Ok(())
    }
}
