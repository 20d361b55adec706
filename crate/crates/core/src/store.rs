//! The threaded-code program area.
//!
//! Cells are addressed from 1. After compilation a cell is one of:
//! a negative opcode (the negated dispatch code), an operand, a positive
//! transfer address, zero (an entry point or the false exit of a program)
//! or [`RECURSIVE_ENTRY`] in the entry cell of a recursive subroutine.

use std::fmt::Write as _;

pub const CAPACITY: usize = 500;

/// Entry-cell marker of a recursive subroutine; also read as "pop the
/// return stack" when reached by a transfer.
pub const RECURSIVE_ENTRY: i32 = 2000;

/// Head of an exit chain: 0, or the address of the newest unfilled link.
pub type ExitChain = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("program store address {0} outside 1..={CAPACITY}")]
pub struct OutOfRange(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramStore {
    cells: Vec<i32>,
    /// Next free address.
    pub emit_cursor: usize,
    /// Entry cell of the program being compiled or run.
    pub origin: usize,
}

impl Default for ProgramStore {
    fn default() -> Self {
        ProgramStore::new()
    }
}

impl ProgramStore {
    pub fn new() -> ProgramStore {
        ProgramStore {
            cells: vec![0; CAPACITY],
            emit_cursor: 1,
            origin: 1,
        }
    }

    pub fn capacity(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, addr: usize) -> Result<i32, OutOfRange> {
        addr.checked_sub(1)
            .and_then(|i| self.cells.get(i))
            .copied()
            .ok_or(OutOfRange(addr))
    }

    pub fn set(&mut self, addr: usize, value: i32) -> Result<(), OutOfRange> {
        let cell = addr
            .checked_sub(1)
            .and_then(|i| self.cells.get_mut(i))
            .ok_or(OutOfRange(addr))?;
        *cell = value;
        Ok(())
    }

    /// Writes at the emit cursor and advances it.
    pub fn emit(&mut self, value: i32) -> Result<usize, OutOfRange> {
        let addr = self.emit_cursor;
        self.set(addr, value)?;
        self.emit_cursor += 1;
        Ok(addr)
    }

    /// Cells `from..=to`, clipped to the store.
    pub fn cells(&self, from: usize, to: usize) -> &[i32] {
        let lo = from.max(1) - 1;
        let hi = to.min(self.cells.len());
        if lo >= hi {
            &[]
        } else {
            &self.cells[lo..hi]
        }
    }

    /// Overwrites every link of the chain starting at `head` with `target`.
    pub fn fill_chain(&mut self, head: ExitChain, target: usize) -> Result<(), OutOfRange> {
        let mut link = head;
        let mut steps = 0;
        while link != 0 {
            let next = self.get(link)?;
            self.set(link, target as i32)?;
            link = usize::try_from(next).map_err(|_| OutOfRange(link))?;
            steps += 1;
            debug_assert!(steps <= CAPACITY, "cyclic exit chain");
        }
        Ok(())
    }

    /// Object listing of `from..=to`: eleven values per line, seven columns each.
    pub fn dump_listing(&self, from: usize, to: usize) -> Vec<String> {
        dump_cells(self.cells(from, to))
    }
}

pub fn dump_cells(cells: &[i32]) -> Vec<String> {
    cells
        .chunks(11)
        .map(|chunk| {
            let mut line = String::with_capacity(77);
            for v in chunk {
                let _ = write!(line, "{v:>7}");
            }
            line
        })
        .collect()
}

/// How many cells follow an opcode, and whether it ends in a false link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperandShape {
    /// Operator with `n` inline operands.
    Operator(usize),
    /// Predicate with `n` inline operands followed by its false link.
    Predicate(usize),
    /// Counter: reload value, live count, false link.
    Counter,
    /// Quoted string: count cell then that many characters.
    String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntegrityError {
    #[error("cell {addr}: entry cell holds {value}")]
    BadEntry { addr: usize, value: i32 },
    #[error("cell {addr}: transfer to {target} outside {lo}..={hi}")]
    TransferOutOfRange {
        addr: usize,
        target: i32,
        lo: usize,
        hi: usize,
    },
    #[error("cell {addr}: zero transfer (unfilled exit link)")]
    UnfilledLink { addr: usize },
    #[error("cell {addr}: opcode {code} has no known shape")]
    UnknownOpcode { addr: usize, code: i32 },
    #[error("program {origin}..{end} has no terminal pair")]
    MissingTerminal { origin: usize, end: usize },
    #[error("cell {addr}: operands run past the program end")]
    Truncated { addr: usize },
}

/// Structural check of one compiled program occupying `origin..end`.
///
/// Decodes opcodes with `shape`, then requires: the entry cell is 0 or the
/// recursive marker; the last two cells are `0, origin`; every transfer
/// cell (links, separators, loops) lands inside the program; and no
/// transfer cell other than the terminal one is zero.
pub fn check_program(
    store: &ProgramStore,
    origin: usize,
    end: usize,
    shape: impl Fn(i32) -> Option<OperandShape>,
) -> Result<(), IntegrityError> {
    let cells = store.cells(origin, end - 1);
    let at = |addr: usize| cells[addr - origin];
    if end < origin + 3 || cells.len() != end - origin {
        return Err(IntegrityError::MissingTerminal { origin, end });
    }
    let entry = at(origin);
    if entry != 0 && entry != RECURSIVE_ENTRY {
        return Err(IntegrityError::BadEntry {
            addr: origin,
            value: entry,
        });
    }
    let terminal = end - 2;
    if at(terminal) != 0 || at(terminal + 1) != origin as i32 {
        return Err(IntegrityError::MissingTerminal { origin, end });
    }

    let check_transfer = |addr: usize| -> Result<(), IntegrityError> {
        let target = at(addr);
        if target == 0 {
            return Err(IntegrityError::UnfilledLink { addr });
        }
        if target <= origin as i32 || target > (end - 1) as i32 {
            return Err(IntegrityError::TransferOutOfRange {
                addr,
                target,
                lo: origin + 1,
                hi: end - 1,
            });
        }
        Ok(())
    };

    let mut addr = origin + 1;
    while addr < terminal {
        let cell = at(addr);
        if cell >= 0 {
            check_transfer(addr)?;
            addr += 1;
            continue;
        }
        let shape = shape(-cell).ok_or(IntegrityError::UnknownOpcode { addr, code: -cell })?;
        let (operands, link) = match shape {
            OperandShape::Operator(n) => (n, false),
            OperandShape::Predicate(n) => (n, true),
            OperandShape::Counter => (2, true),
            OperandShape::String => {
                let count = if addr + 1 < terminal {
                    at(addr + 1)
                } else {
                    -1
                };
                if count < 0 {
                    return Err(IntegrityError::Truncated { addr });
                }
                (1 + count as usize, false)
            }
        };
        let next = addr + 1 + operands + usize::from(link);
        if next > terminal {
            return Err(IntegrityError::Truncated { addr });
        }
        if link {
            check_transfer(next - 1)?;
        }
        addr = next;
    }
    Ok(())
}
