//! Threaded-code execution and the built-in operations.

use std::sync::atomic::Ordering;

use crate::charset::A1Word;
use crate::compiler::ExecBinding;
use crate::error::{RecError, Stop};
use crate::iosys::{ErrorCode, LineSink};
use crate::numio::{format_scientific, parse_number, ParseMode};
use crate::session::Session;
use crate::store::RECURSIVE_ENTRY;

pub const STACK_DEPTH: usize = 200;
pub const RETURN_DEPTH: usize = 100;
pub const VARIABLES: usize = 10;

const EQUALITY_TOLERANCE: f32 = 5.0e-6;

pub const INTERRUPT_NOTICE: &str = " MANUAL INTERRUPT FROM SWITCH  5";

/// The thirty system operations, numbered as in the execution table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Abs = 1,
    Cos = 2,
    Exp = 3,
    Tanh = 4,
    Negate = 5,
    Negative = 6,
    Output = 7,
    Sqrt = 8,
    Store = 9,
    Atan = 10,
    Ln = 11,
    Sin = 12,
    Zero = 13,
    Power = 14,
    Add = 15,
    Subtract = 16,
    Multiply = 17,
    Equal = 18,
    Divide = 19,
    Constant = 20,
    Fetch = 21,
    Input = 22,
    Duplicate = 23,
    Read = 24,
    Write = 25,
    Quoted = 26,
    Match = 27,
    Flush = 28,
    Counter = 29,
    Lift = 30,
}

impl Builtin {
    pub const ALL: [Builtin; 30] = [
        Builtin::Abs,
        Builtin::Cos,
        Builtin::Exp,
        Builtin::Tanh,
        Builtin::Negate,
        Builtin::Negative,
        Builtin::Output,
        Builtin::Sqrt,
        Builtin::Store,
        Builtin::Atan,
        Builtin::Ln,
        Builtin::Sin,
        Builtin::Zero,
        Builtin::Power,
        Builtin::Add,
        Builtin::Subtract,
        Builtin::Multiply,
        Builtin::Equal,
        Builtin::Divide,
        Builtin::Constant,
        Builtin::Fetch,
        Builtin::Input,
        Builtin::Duplicate,
        Builtin::Read,
        Builtin::Write,
        Builtin::Quoted,
        Builtin::Match,
        Builtin::Flush,
        Builtin::Counter,
        Builtin::Lift,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Builtin> {
        Builtin::ALL.get(usize::from(id).checked_sub(1)?).copied()
    }

    /// Source spellings bound to this operation; a leading quote selects
    /// the upper half of the tables.
    pub fn symbols(self) -> &'static [&'static str] {
        use Builtin::*;
        match self {
            Abs => &["A"],
            Cos => &["C"],
            Exp => &["E"],
            Tanh => &["H"],
            Negate => &["M"],
            Negative => &["N"],
            Output => &["O"],
            Sqrt => &["Q"],
            Store => &["S"],
            Atan => &["'A"],
            Ln => &["'L"],
            Sin => &["'S"],
            Zero => &["0"],
            Power => &["B"],
            Add => &["+", "&"],
            Subtract => &["-"],
            Multiply => &["*"],
            Equal => &["J"],
            Divide => &["/"],
            Constant => &["'/"],
            Fetch => &["F"],
            Input => &["I"],
            Duplicate => &["P"],
            Read => &["R"],
            Write => &["W"],
            Quoted => &["\"", "''"],
            Match => &["="],
            Flush => &["X"],
            Counter => &["$", "!"],
            Lift => &["L"],
        }
    }
}

/// Operand stack, variables and recursion stack of a running program.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeState {
    stack: [f32; STACK_DEPTH],
    /// 1-based index of the next free stack slot.
    im: usize,
    vars: [f32; VARIABLES],
    returns: [usize; RETURN_DEPTH],
    /// 1-based index of the next free return slot.
    irec: usize,
    /// Address of the cell being executed.
    pub exec_cursor: usize,
}

impl Default for RuntimeState {
    fn default() -> Self {
        RuntimeState {
            stack: [0.0; STACK_DEPTH],
            im: 1,
            vars: [0.0; VARIABLES],
            returns: [0; RETURN_DEPTH],
            irec: 1,
            exec_cursor: 0,
        }
    }
}

impl RuntimeState {
    /// Stack contents, bottom first.
    pub fn stack(&self) -> &[f32] {
        &self.stack[..self.im - 1]
    }

    pub fn accumulator(&self) -> Option<f32> {
        self.stack().last().copied()
    }

    /// Variable slots 1..=10 (slot 10 is named `0`).
    pub fn vars(&self) -> &[f32; VARIABLES] {
        &self.vars
    }

    pub fn reset_stack(&mut self) {
        self.im = 1;
    }

    pub fn recursion_depth(&self) -> usize {
        self.irec - 1
    }

    fn acc_mut(&mut self) -> &mut f32 {
        &mut self.stack[self.im - 2]
    }

    fn var_slot(k: i32) -> Result<usize, Stop> {
        usize::try_from(k)
            .ok()
            .filter(|k| (1..=VARIABLES).contains(k))
            .map(|k| k - 1)
            .ok_or(Stop::Diagnostic(ErrorCode::AddressFault))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Completed,
    Interrupted,
    Failed(ErrorCode),
}

fn finite(v: f32) -> Result<f32, Stop> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ErrorCode::ArithmeticFault.into())
    }
}

fn address(v: i32) -> Result<usize, Stop> {
    usize::try_from(v).map_err(|_| ErrorCode::AddressFault.into())
}

impl<S: LineSink> Session<S> {
    fn cell(&self, addr: usize) -> Result<i32, Stop> {
        self.store
            .get(addr)
            .map_err(|_| ErrorCode::AddressFault.into())
    }

    fn set(&mut self, addr: usize, v: i32) -> Result<(), Stop> {
        self.store
            .set(addr, v)
            .map_err(|_| ErrorCode::AddressFault.into())
    }

    fn interrupt_raised(&mut self) -> bool {
        if self.cancel.swap(false, Ordering::SeqCst) {
            return true;
        }
        if let Some(limit) = self.max_steps {
            if self.steps >= limit {
                return true;
            }
        }
        self.steps += 1;
        false
    }

    /// Runs the main program at the store origin.
    pub(crate) fn execute(&mut self) -> Result<RunOutcome, RecError> {
        self.steps = 0;
        let outcome = match self.run_program() {
            Ok(outcome) => outcome,
            Err(Stop::Diagnostic(code)) => {
                self.report(code)?;
                RunOutcome::Failed(code)
            }
            Err(Stop::Halt(e)) => return Err(e),
        };
        self.writer.flush_line()?;
        self.writer.page_eject()?;
        Ok(outcome)
    }

    fn run_program(&mut self) -> Result<RunOutcome, Stop> {
        let origin = self.store.origin;
        let mut ixl = origin + 1;
        self.runtime.irec = 1;
        loop {
            self.runtime.exec_cursor = ixl;
            if ixl == origin {
                return Ok(RunOutcome::Completed);
            }
            let cell = self.cell(ixl)?;
            if cell < 0 {
                let code = address(-cell)?;
                ixl += 1;
                let binding = self.tables.binding(code);
                if self.interrupt_raised() {
                    self.writer.console_notice(INTERRUPT_NOTICE)?;
                    return Ok(RunOutcome::Interrupted);
                }
                match binding {
                    ExecBinding::Builtin(op) => {
                        self.runtime.exec_cursor = ixl;
                        self.exec_builtin(op)?;
                        ixl = self.runtime.exec_cursor;
                    }
                    ExecBinding::Subroutine {
                        entry,
                        recursive: false,
                    } => {
                        self.set(entry, (ixl + 1) as i32)?;
                        ixl = entry + 1;
                    }
                    ExecBinding::Subroutine {
                        entry,
                        recursive: true,
                    } => {
                        if self.runtime.irec > RETURN_DEPTH {
                            return Err(ErrorCode::ExcessiveRecursion.into());
                        }
                        self.runtime.returns[self.runtime.irec - 1] = ixl + 1;
                        self.runtime.irec += 1;
                        ixl = entry + 1;
                    }
                    ExecBinding::DeclaredRecursive => {
                        return Err(ErrorCode::RecursiveUndefined.into())
                    }
                    ExecBinding::Undefined => return Err(ErrorCode::Undefined.into()),
                }
            } else if cell == 0 {
                ixl = address(self.cell(ixl + 1)?)?;
                if ixl == origin {
                    return Ok(RunOutcome::Completed);
                }
                let entry = self.cell(ixl)?;
                ixl = if entry >= RECURSIVE_ENTRY {
                    self.pop_return()? - 1
                } else {
                    address(entry - 1)?
                };
            } else {
                let from = ixl;
                ixl = address(cell)?;
                if cell >= RECURSIVE_ENTRY {
                    ixl = self.pop_return()?;
                } else if ixl <= from && self.interrupt_raised() {
                    // a loop made only of transfers never dispatches an opcode
                    self.writer.console_notice(INTERRUPT_NOTICE)?;
                    return Ok(RunOutcome::Interrupted);
                }
            }
        }
    }

    fn pop_return(&mut self) -> Result<usize, Stop> {
        if self.runtime.irec <= 1 {
            return Err(ErrorCode::AddressFault.into());
        }
        self.runtime.irec -= 1;
        Ok(self.runtime.returns[self.runtime.irec - 1])
    }

    /// Executes one operation with the cursor on the cell after its
    /// opcode. A true predicate moves past its link cell; a false one
    /// leaves the cursor on it.
    fn exec_builtin(&mut self, op: Builtin) -> Result<(), Stop> {
        use Builtin::*;
        let id = op.id();
        let arg = self.cell(self.runtime.exec_cursor);
        let rt = &mut self.runtime;
        match id {
            1..=13 if rt.im <= 1 => return Err(ErrorCode::EmptyPushdown.into()),
            14..=19 => {
                if rt.im <= 2 {
                    return Err(ErrorCode::EmptyPushdown.into());
                }
                rt.im -= 1;
            }
            20..=23 => {
                if rt.im > STACK_DEPTH {
                    return Err(ErrorCode::PushdownOverflow.into());
                }
                rt.im += 1;
            }
            _ => {}
        }
        let im = rt.im;
        match op {
            Abs | Cos | Exp | Tanh | Negate | Sqrt | Atan | Ln | Sin => {
                let a = *rt.acc_mut();
                let r = match op {
                    Abs => a.abs(),
                    Cos => a.cos(),
                    Exp => a.exp(),
                    Tanh => a.tanh(),
                    Negate => -a,
                    Sqrt => a.sqrt(),
                    Atan => a.atan(),
                    Ln => a.ln(),
                    _ => a.sin(),
                };
                *rt.acc_mut() = finite(r)?;
            }
            Negative => {
                if *rt.acc_mut() < 0.0 {
                    rt.exec_cursor += 1;
                }
            }
            Zero => {
                if rt.acc_mut().abs() <= EQUALITY_TOLERANCE {
                    rt.exec_cursor += 1;
                }
            }
            Output => {
                let v = *rt.acc_mut();
                let (glyphs, _) = format_scientific(v, &mut self.writer)?;
                self.iac = glyphs[glyphs.len() - 1];
            }
            Store => {
                let k = RuntimeState::var_slot(arg?)?;
                let rt = &mut self.runtime;
                rt.vars[k] = *rt.acc_mut();
                rt.exec_cursor += 1;
            }
            Power | Add | Subtract | Multiply | Divide => {
                let (a, b) = (rt.stack[im - 2], rt.stack[im - 1]);
                let r = match op {
                    Power => a.powf(b),
                    Add => a + b,
                    Subtract => a - b,
                    Multiply => a * b,
                    _ => a / b,
                };
                rt.stack[im - 2] = finite(r)?;
            }
            Equal => {
                rt.im += 1;
                let (a, b) = (rt.stack[im - 1], rt.stack[im - 2]);
                if (a - b).abs() <= EQUALITY_TOLERANCE {
                    rt.exec_cursor += 1;
                }
            }
            Constant => {
                let k = address(arg?)?;
                let v = self
                    .consts
                    .get(k)
                    .ok_or(Stop::Diagnostic(ErrorCode::AddressFault))?;
                let rt = &mut self.runtime;
                rt.stack[im - 2] = v;
                rt.exec_cursor += 1;
            }
            Fetch => {
                let k = RuntimeState::var_slot(arg?)?;
                let rt = &mut self.runtime;
                rt.stack[im - 2] = rt.vars[k];
                rt.exec_cursor += 1;
            }
            Input => {
                let v = self.read_datum()?;
                self.runtime.stack[im - 2] = v;
            }
            Duplicate => {
                if im <= 2 {
                    return Err(ErrorCode::EmptyPushdown.into());
                }
                rt.stack[im - 2] = rt.stack[im - 3];
            }
            Read => {
                self.read()?;
            }
            Write => self.writer.put_char(self.iac)?,
            Quoted => {
                let n = arg?;
                for _ in 0..n.max(0) {
                    self.runtime.exec_cursor += 1;
                    let c = self.cell(self.runtime.exec_cursor)?;
                    self.iac = A1Word(c as i16);
                    self.writer.put_char(self.iac)?;
                }
                self.runtime.exec_cursor += 1;
            }
            Match => {
                if self.iac.0 as i32 == arg? {
                    self.runtime.exec_cursor += 1;
                }
                self.runtime.exec_cursor += 1;
            }
            Flush => self.writer.flush_line()?,
            Counter => self.exec_counter()?,
            Lift => {
                if rt.im > 1 {
                    rt.im -= 1;
                }
            }
        }
        Ok(())
    }

    /// Steps a counter whose two value cells follow the cursor.
    fn exec_counter(&mut self) -> Result<(), Stop> {
        let live = self.runtime.exec_cursor + 1;
        let k = self.cell(live)?;
        if k < 0 {
            self.set(live, k + 1)?;
            self.runtime.exec_cursor = live + 2;
        } else {
            let reload = self.cell(live - 1)?;
            self.set(live, reload)?;
            self.runtime.exec_cursor = live + 1;
        }
        Ok(())
    }

    /// Reads a datum of the form `'/ number '`, blanks allowed around it.
    fn read_datum(&mut self) -> Result<f32, Stop> {
        let mut c = self.read()?;
        while c == A1Word::BLANK {
            c = self.read()?;
        }
        if c != A1Word::QUOTE || self.read()? != A1Word::SLASH {
            return Err(ErrorCode::NumericSyntax.into());
        }
        let n = parse_number(ParseMode::FloatSilent, &mut self.reader, &mut self.writer)?;
        self.iac = n.terminator;
        while self.iac == A1Word::BLANK {
            self.read()?;
        }
        if self.iac != A1Word::QUOTE {
            return Err(ErrorCode::NumericSyntax.into());
        }
        Ok(n.float_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for (i, op) in Builtin::ALL.iter().enumerate() {
            assert_eq!(op.id() as usize, i + 1);
            assert_eq!(Builtin::from_id(op.id()), Some(*op));
        }
        assert_eq!(Builtin::from_id(0), None);
        assert_eq!(Builtin::from_id(31), None);
    }

    #[test]
    fn every_symbol_bound_once() {
        let mut seen = std::collections::HashSet::new();
        for op in Builtin::ALL {
            for s in op.symbols() {
                assert!(seen.insert(*s), "{s} bound twice");
            }
        }
        assert_eq!(seen.len(), 33);
    }

    #[test]
    fn fresh_state() {
        let rt = RuntimeState::default();
        assert!(rt.stack().is_empty());
        assert_eq!(rt.accumulator(), None);
        assert_eq!(rt.recursion_depth(), 0);
    }
}
