//! Monitor phase and one-pass compilation into the program store.

use crate::charset::{a1_of, A1Word, SixBitCode};
use crate::error::{RecError, Stop};
use crate::interpreter::Builtin;
use crate::iosys::{ErrorCode, InputUnit, LineSink, OutputUnit};
use crate::numio::{parse_number, ParseMode};
use crate::session::Session;
use crate::store::{ExitChain, OperandShape, OutOfRange, RECURSIVE_ENTRY};

/// Highest emit cursor at which another source character is accepted.
const DISPATCH_GUARD: usize = 495;
/// Highest emit cursor after a string character.
const STRING_GUARD: usize = 496;

pub const MAX_DEPTH: usize = 10;
pub const MAX_CONSTANTS: usize = 30;

/// What a glyph compiles to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompileCode {
    Ignored = 0,
    LeftParen = 1,
    RightParen = 2,
    Separator = 3,
    Repeat = 4,
    Operator = 5,
    NumericOperator = 6,
    Predicate = 7,
    CharPredicate = 8,
    Counter = 9,
    Constant = 10,
    Quote = 11,
    Comment = 12,
    String = 13,
    Unsupported = 14,
}

/// What an opcode does when executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecBinding {
    Builtin(Builtin),
    Undefined,
    /// Named by the monitor `N` command but not yet compiled.
    DeclaredRecursive,
    Subroutine {
        entry: usize,
        recursive: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorCommand {
    Input = 1,
    Output = 2,
    Terminate = 3,
    Erase = 4,
    Recursive = 5,
    Suppress = 6,
}

/// Compile codes, execution bindings and monitor commands, indexed by
/// six-bit code (1..=128; the monitor only uses 1..=64).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispatchTables {
    compile: [CompileCode; 129],
    exec: [ExecBinding; 129],
    monitor: [Option<MonitorCommand>; 65],
}

fn code(glyph: char) -> usize {
    a1_of(glyph)
        .map(|w| w.six_bit().index())
        .unwrap_or_else(|| panic!("{glyph:?} not in repertoire"))
}

fn quoted(glyph: char) -> usize {
    code(glyph) + 64
}

/// Table index of a spelling such as `N` or `'R`.
pub fn symbol_code(symbol: &str) -> usize {
    let mut chars = symbol.chars();
    match (chars.next(), chars.next()) {
        (Some('\''), Some(g)) => quoted(g),
        (Some(g), None) => code(g),
        _ => panic!("bad symbol {symbol:?}"),
    }
}

impl Default for DispatchTables {
    fn default() -> Self {
        DispatchTables::pristine()
    }
}

impl DispatchTables {
    /// The tables as loaded at start-up and restored by `E`.
    pub fn pristine() -> DispatchTables {
        use CompileCode::*;
        let mut compile = [Predicate; 129];
        compile[0] = Ignored;
        compile[1] = Ignored;
        compile[43] = Ignored;
        let plain: &[(&str, CompileCode)] = &[
            ("ABCEHILMOPQRWX+&*-/", Operator),
            ("FS", NumericOperator),
            (".:", Repeat),
            ("<)", RightParen),
            ("(%", LeftParen),
            (",;", Separator),
            ("$!", Counter),
            ("DGTUVZ", Unsupported),
            ("#=", CharPredicate),
            ("@'", Quote),
            ("\"", String),
        ];
        for (glyphs, cc) in plain {
            for g in glyphs.chars() {
                compile[code(g)] = *cc;
            }
        }
        for g in "ALS".chars() {
            compile[quoted(g)] = Operator;
        }
        compile[quoted('/')] = Constant;
        compile[quoted('*')] = Comment;
        compile[quoted('\'')] = String;
        for g in "DTU".chars() {
            compile[quoted(g)] = Unsupported;
        }

        let mut exec = [ExecBinding::Undefined; 129];
        for op in Builtin::ALL {
            for symbol in op.symbols() {
                exec[symbol_code(symbol)] = ExecBinding::Builtin(op);
            }
        }

        let mut monitor = [None; 65];
        for (g, cmd) in [
            ('I', MonitorCommand::Input),
            ('O', MonitorCommand::Output),
            ('T', MonitorCommand::Terminate),
            ('E', MonitorCommand::Erase),
            ('N', MonitorCommand::Recursive),
            ('S', MonitorCommand::Suppress),
        ] {
            monitor[code(g)] = Some(cmd);
        }
        DispatchTables {
            compile,
            exec,
            monitor,
        }
    }

    pub fn compile_code(&self, code: usize) -> CompileCode {
        self.compile
            .get(code)
            .copied()
            .unwrap_or(CompileCode::Ignored)
    }

    pub fn set_compile_code(&mut self, code: usize, cc: CompileCode) {
        self.compile[code] = cc;
    }

    pub fn binding(&self, code: usize) -> ExecBinding {
        self.exec
            .get(code)
            .copied()
            .unwrap_or(ExecBinding::Undefined)
    }

    pub fn set_binding(&mut self, code: usize, binding: ExecBinding) {
        self.exec[code] = binding;
    }

    pub fn monitor_command(&self, code: usize) -> Option<MonitorCommand> {
        self.monitor.get(code).copied().flatten()
    }

    /// Layout of the cells following opcode `code`, as compiled under the
    /// current compile codes.
    pub fn operand_shape(&self, code: usize) -> Option<OperandShape> {
        use CompileCode::*;
        Some(match self.compile_code(code) {
            Operator => OperandShape::Operator(0),
            NumericOperator | Constant => OperandShape::Operator(1),
            Predicate => OperandShape::Predicate(0),
            CharPredicate => OperandShape::Predicate(1),
            Counter => OperandShape::Counter,
            String => OperandShape::String,
            _ => return None,
        })
    }
}

/// Program-defined constants. Slots above `committed` belong to the
/// program being compiled and are released if it runs immediately.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstPool {
    values: [f32; MAX_CONSTANTS],
    pub committed: usize,
    pub high_water: usize,
}

impl ConstPool {
    /// Value in 1-based slot `k`.
    pub fn get(&self, k: usize) -> Option<f32> {
        k.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    /// Claims the next slot for `v`.
    pub fn push(&mut self, v: f32) -> Result<usize, ErrorCode> {
        self.high_water += 1;
        if self.high_water > MAX_CONSTANTS {
            return Err(ErrorCode::ConstantExcess);
        }
        self.values[self.high_water - 1] = v;
        Ok(self.high_water)
    }

    pub fn reset(&mut self) {
        self.committed = 0;
        self.high_water = 0;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParenFrame {
    pub loop_target: usize,
    pub false_head: ExitChain,
    pub true_head: ExitChain,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParenStack {
    frames: [ParenFrame; MAX_DEPTH],
    depth: usize,
}

impl ParenStack {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn clear(&mut self) {
        self.depth = 0;
    }

    pub fn push(&mut self, loop_target: usize) -> Result<(), ErrorCode> {
        if self.depth >= MAX_DEPTH {
            return Err(ErrorCode::ExcessNesting);
        }
        self.depth += 1;
        self.frames[self.depth - 1] = ParenFrame {
            loop_target,
            ..ParenFrame::default()
        };
        Ok(())
    }

    pub fn pop(&mut self) {
        self.depth = self.depth.saturating_sub(1);
    }

    pub fn top(&self) -> &ParenFrame {
        &self.frames[self.depth.max(1) - 1]
    }

    pub fn top_mut(&mut self) -> &mut ParenFrame {
        &mut self.frames[self.depth.max(1) - 1]
    }

    /// Frame enclosing the top one.
    pub fn parent_mut(&mut self) -> Option<&mut ParenFrame> {
        self.depth.checked_sub(2).map(move |i| &mut self.frames[i])
    }
}

pub(crate) enum MonitorExit {
    Compile,
    Terminate,
}

pub(crate) enum CompileExit {
    Immediate,
    Failed,
}

enum Control {
    Continue,
    Finished,
}

fn store_fault(_: OutOfRange) -> Stop {
    Stop::Diagnostic(ErrorCode::ProgramTooLong)
}

impl<S: LineSink> Session<S> {
    pub(crate) fn read(&mut self) -> Result<A1Word, RecError> {
        self.iac = self.reader.read_char()?;
        Ok(self.iac)
    }

    pub(crate) fn read_echo(&mut self) -> Result<A1Word, RecError> {
        let c = self.read()?;
        self.writer.put_char(c)?;
        Ok(c)
    }

    pub(crate) fn report(&mut self, code: ErrorCode) -> Result<(), RecError> {
        self.diagnostics += 1;
        self.writer.emit_message(code)?;
        Ok(())
    }

    fn emit(&mut self, v: i32) -> Result<usize, Stop> {
        self.store.emit(v).map_err(store_fault)
    }

    fn set_cell(&mut self, addr: usize, v: i32) -> Result<(), Stop> {
        self.store.set(addr, v).map_err(store_fault)
    }

    fn fill(&mut self, head: ExitChain) -> Result<(), Stop> {
        let target = self.store.emit_cursor;
        self.store.fill_chain(head, target).map_err(store_fault)
    }

    /// Emits a link cell onto the top frame's false chain.
    fn link_false(&mut self) -> Result<(), Stop> {
        let head = self.parens.top().false_head;
        let addr = self.emit(head as i32)?;
        self.parens.top_mut().false_head = addr;
        Ok(())
    }

    /// Scans monitor cards until a program starts or `T` is read.
    pub(crate) fn monitor(&mut self) -> Result<MonitorExit, RecError> {
        loop {
            self.reader.force_refill();
            let c = self.read_echo()?;
            if c == A1Word::ASTERISK {
                break;
            }
            if c == A1Word::LETTER_C {
                for _ in 1..crate::iosys::CARD_COLUMNS {
                    self.read_echo()?;
                }
                self.writer.flush_line()?;
            } else {
                self.writer.discard();
            }
        }
        loop {
            let c = self.read()?;
            if c == A1Word::LPAREN {
                break;
            }
            self.writer.put_char(c)?;
            let Some(command) = self.tables.monitor_command(c.six_bit().index()) else {
                continue;
            };
            let arg = self.read()?;
            if arg == A1Word::LPAREN {
                break;
            }
            self.writer.put_char(arg)?;
            let k = arg.six_bit().index();
            match command {
                MonitorCommand::Input => match k {
                    51 => self.reader.select(InputUnit::Card),
                    55 => self.reader.select(InputUnit::Keyboard),
                    _ => self.report(ErrorCode::IllegalUnit)?,
                },
                MonitorCommand::Output => match k {
                    50 => self.writer.select(OutputUnit::Typewriter),
                    51 => self.writer.select(OutputUnit::Punch),
                    52 => self.writer.select(OutputUnit::Printer),
                    _ => self.report(ErrorCode::IllegalUnit)?,
                },
                MonitorCommand::Terminate => {
                    self.writer.flush_line()?;
                    return Ok(MonitorExit::Terminate);
                }
                MonitorCommand::Erase => {
                    self.store.emit_cursor = 1;
                    self.tables = DispatchTables::pristine();
                    self.consts.reset();
                }
                MonitorCommand::Recursive => {
                    let mut name = k;
                    if self.tables.compile_code(name) == CompileCode::Quote {
                        name = self.read_echo()?.six_bit().quote_extend().index();
                    }
                    self.tables.set_compile_code(name, CompileCode::Predicate);
                    self.tables
                        .set_binding(name, ExecBinding::DeclaredRecursive);
                }
                MonitorCommand::Suppress => self.writer.set_echo(false),
            }
        }

        self.writer.put_char(A1Word::LPAREN)?;
        self.writer.flush_line()?;
        self.parens.clear();
        let origin = self.store.emit_cursor;
        self.store.origin = origin;
        // a full store is rejected by the dispatch guard on the first character
        let _ = self.store.set(origin, 0);
        self.store.emit_cursor = origin + 1;
        let loop_target = self.store.emit_cursor;
        self.parens
            .push(loop_target)
            .expect("empty paren stack accepts a frame");
        Ok(MonitorExit::Compile)
    }

    /// Compiles programs until one is to be executed immediately.
    pub(crate) fn compile(&mut self) -> Result<CompileExit, RecError> {
        match self.compile_programs() {
            Ok(()) => Ok(CompileExit::Immediate),
            Err(Stop::Diagnostic(code)) => {
                self.report(code)?;
                self.writer.flush_line()?;
                self.writer.page_eject()?;
                Ok(CompileExit::Failed)
            }
            Err(Stop::Halt(e)) => Err(e),
        }
    }

    fn compile_programs(&mut self) -> Result<(), Stop> {
        loop {
            if self.store.emit_cursor > DISPATCH_GUARD {
                return Err(ErrorCode::ProgramTooLong.into());
            }
            let mut code = self.read_echo()?.six_bit().index();
            loop {
                match self.tables.compile_code(code) {
                    CompileCode::Ignored => {}
                    CompileCode::LeftParen => self.left_paren()?,
                    CompileCode::RightParen => {
                        if let Control::Finished = self.right_paren()? {
                            return Ok(());
                        }
                    }
                    CompileCode::Separator => self.separator()?,
                    CompileCode::Repeat => self.repeat()?,
                    CompileCode::Operator => self.atom(code, None, false)?,
                    CompileCode::NumericOperator => self.atom(code, Some(true), false)?,
                    CompileCode::Predicate => self.atom(code, None, true)?,
                    CompileCode::CharPredicate => self.atom(code, Some(false), true)?,
                    CompileCode::Counter => self.counter(code)?,
                    CompileCode::Constant => self.constant(code)?,
                    CompileCode::Quote => {
                        code = self.read_echo()?.six_bit().quote_extend().index();
                        continue;
                    }
                    CompileCode::Comment => while self.read_echo()? != A1Word::QUOTE {},
                    CompileCode::String => self.quoted_string(code)?,
                    CompileCode::Unsupported => return Err(ErrorCode::CdcOperator.into()),
                }
                break;
            }
        }
    }

    fn left_paren(&mut self) -> Result<(), Stop> {
        let target = self.store.emit_cursor;
        self.parens.push(target)?;
        Ok(())
    }

    fn right_paren(&mut self) -> Result<Control, Stop> {
        if let Some(parent) = self.parens.parent_mut() {
            let head = parent.false_head;
            let addr = self.store.emit_cursor;
            parent.false_head = addr;
            self.set_cell(addr, head as i32)?;
        }
        self.store.emit_cursor += 1;
        let frame = *self.parens.top();
        self.fill(frame.false_head)?;
        self.fill(frame.true_head)?;
        self.parens.pop();
        if self.parens.depth() > 0 {
            return Ok(Control::Continue);
        }
        let end = self.store.emit_cursor;
        self.set_cell(end - 1, 0)?;
        self.set_cell(end, self.store.origin as i32)?;
        self.finish_program()
    }

    fn finish_program(&mut self) -> Result<Control, Stop> {
        let first = self.read_echo()?.six_bit().index();
        let second = self.read_echo()?.six_bit().quote_extend().index();
        let third = self.read_echo()?;
        self.writer.flush_line()?;
        if third == A1Word::LETTER_L || self.listing_always {
            let lines = self
                .store
                .dump_listing(self.store.origin, self.store.emit_cursor);
            for line in lines {
                self.writer.write_direct(line)?;
            }
        }
        self.store.emit_cursor += 1;

        if first == SixBitCode::BLANK.index() {
            self.consts.high_water = self.consts.committed;
            self.writer.set_echo(true);
            return Ok(Control::Finished);
        }

        let name = if self.tables.compile_code(first) == CompileCode::Quote {
            second
        } else {
            first
        };
        self.tables.set_compile_code(name, CompileCode::Predicate);
        let entry = self.store.origin;
        let recursive = self.tables.binding(name) == ExecBinding::DeclaredRecursive;
        if recursive {
            self.set_cell(entry, RECURSIVE_ENTRY)?;
        }
        self.tables
            .set_binding(name, ExecBinding::Subroutine { entry, recursive });

        self.consts.committed = self.consts.high_water;
        self.parens.clear();
        self.store.origin = self.store.emit_cursor;
        self.emit(0)?;
        loop {
            let c = self.read()?;
            if c == A1Word::LPAREN {
                self.writer.put_char(c)?;
                self.left_paren()?;
                return Ok(Control::Continue);
            }
            if c != A1Word::BLANK {
                return Err(ErrorCode::StrayCharacter.into());
            }
        }
    }

    fn separator(&mut self) -> Result<(), Stop> {
        let head = self.parens.top().true_head;
        let addr = self.emit(head as i32)?;
        self.parens.top_mut().true_head = addr;
        self.close_segment()
    }

    fn repeat(&mut self) -> Result<(), Stop> {
        let target = self.parens.top().loop_target;
        self.emit(target as i32)?;
        self.close_segment()
    }

    fn close_segment(&mut self) -> Result<(), Stop> {
        let head = self.parens.top().false_head;
        self.fill(head)?;
        self.parens.top_mut().false_head = 0;
        Ok(())
    }

    /// `arg`: `None` for no argument, `Some(true)` for a digit,
    /// `Some(false)` for any character.
    fn atom(&mut self, code: usize, arg: Option<bool>, predicate: bool) -> Result<(), Stop> {
        self.emit(-(code as i32))?;
        match arg {
            None => {}
            Some(false) => {
                let c = self.read_echo()?;
                self.emit(c.0 as i32)?;
            }
            Some(true) => {
                let c = self.read_echo()?;
                let d = match c.digit_value() {
                    Some(0) => 10,
                    Some(d) => d as i32,
                    None => return Err(ErrorCode::IllegalArgument.into()),
                };
                self.emit(d)?;
            }
        }
        if predicate {
            self.link_false()?;
        }
        Ok(())
    }

    fn counter(&mut self, code: usize) -> Result<(), Stop> {
        self.emit(-(code as i32))?;
        let n = parse_number(ParseMode::IntEcho, &mut self.reader, &mut self.writer)?;
        self.iac = n.terminator;
        if n.int_value <= 0 {
            return Err(ErrorCode::BadCounter.into());
        }
        self.emit(-n.int_value)?;
        self.emit(-n.int_value)?;
        self.link_false()
    }

    fn constant(&mut self, code: usize) -> Result<(), Stop> {
        self.emit(-(code as i32))?;
        let n = parse_number(ParseMode::FloatEcho, &mut self.reader, &mut self.writer)?;
        self.iac = n.terminator;
        while self.iac == A1Word::BLANK {
            self.read_echo()?;
        }
        if self.iac != A1Word::QUOTE {
            return Err(ErrorCode::NumericSyntax.into());
        }
        let slot = self.consts.push(n.float_value);
        self.emit(self.consts.high_water as i32)?;
        slot?;
        Ok(())
    }

    fn quoted_string(&mut self, code: usize) -> Result<(), Stop> {
        self.emit(-(code as i32))?;
        let count_cell = self.emit(0)?;
        let mut count = 0;
        loop {
            let c = self.read_echo()?;
            if c == A1Word::QUOTE {
                break;
            }
            self.emit(c.0 as i32)?;
            count += 1;
            if self.store.emit_cursor > STRING_GUARD {
                return Err(ErrorCode::ProgramTooLong.into());
            }
        }
        self.set_cell(count_cell, count)
    }
}
