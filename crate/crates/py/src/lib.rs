//! Python bindings: run decks, keep a live session, and reach the
//! character, number and listing utilities.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use reca::charset::Charset;
use reca::compiler::symbol_code as core_symbol_code;
use reca::iosys::{CardReader, LineWriter};
use reca::numio::{format_scientific_text, parse_number as core_parse, ParseMode};
use reca::store::dump_cells;
use reca::{Deck, InputUnit, OutputUnit, Record, RunOutcome, SessionConfig, Transcript};

fn config(
    echo: bool,
    width: usize,
    max_steps: Option<u64>,
    listing_always: bool,
) -> PyResult<SessionConfig> {
    if width != 80 && width != 120 {
        return Err(PyValueError::new_err("width must be 80 or 120"));
    }
    Ok(SessionConfig {
        echo,
        printer_width: width,
        max_steps,
        listing_always,
        ..SessionConfig::default()
    })
}

/// Output and summary of one run.
#[pyclass(get_all, frozen)]
pub struct RunResult {
    /// Typewriter and printer lines, in order.
    lines: Vec<String>,
    /// Punch (unit 2) lines.
    punch: Vec<String>,
    page_ejects: usize,
    terminated: bool,
    programs_run: usize,
    diagnostics: usize,
    interrupts: usize,
    exit_code: i32,
}

#[pymethods]
impl RunResult {
    fn text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(lines={}, programs_run={}, diagnostics={}, terminated={})",
            self.lines.len(),
            self.programs_run,
            self.diagnostics,
            self.terminated
        )
    }
}

fn collect(t: &Transcript, summary: reca::SessionSummary) -> RunResult {
    let mut lines = Vec::new();
    let mut punch = Vec::new();
    let mut page_ejects = 0;
    for (unit, record) in &t.records {
        match record {
            Record::Line(s) if *unit == OutputUnit::Punch => punch.push(s.clone()),
            Record::Line(s) => lines.push(s.clone()),
            Record::PageEject => page_ejects += 1,
        }
    }
    RunResult {
        lines,
        punch,
        page_ejects,
        terminated: summary.terminated,
        programs_run: summary.programs_run,
        diagnostics: summary.diagnostics,
        interrupts: summary.interrupts,
        exit_code: summary.exit_code(),
    }
}

/// Runs a whole deck in a fresh session.
#[pyfunction]
#[pyo3(signature = (deck, echo=true, width=120, max_steps=None, listing_always=false))]
fn run_deck(
    deck: &str,
    echo: bool,
    width: usize,
    max_steps: Option<u64>,
    listing_always: bool,
) -> PyResult<RunResult> {
    let cfg = config(echo, width, max_steps, listing_always)?;
    let (t, summary) = reca::run_deck_text(deck, cfg);
    Ok(collect(&t, summary))
}

/// A session whose dispatch tables, subroutines and variables persist
/// between calls to `feed`.
#[pyclass(unsendable)]
pub struct Session {
    inner: reca::Session<Transcript>,
}

#[pymethods]
impl Session {
    #[new]
    #[pyo3(signature = (echo=true, width=120, max_steps=None, listing_always=false))]
    fn new(
        echo: bool,
        width: usize,
        max_steps: Option<u64>,
        listing_always: bool,
    ) -> PyResult<Self> {
        let cfg = config(echo, width, max_steps, listing_always)?;
        Ok(Session {
            inner: reca::Session::new(Transcript::default(), cfg),
        })
    }

    /// Reads `cards` until `T` or the cards run out; returns what was printed.
    fn feed(&mut self, cards: &str) -> PyResult<RunResult> {
        self.inner.attach_cards(Deck::new(cards));
        self.inner.select_input(InputUnit::Card);
        let summary = self
            .inner
            .run()
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let result = collect(self.inner.sink(), summary);
        self.inner.sink_mut().clear();
        Ok(result)
    }

    /// Program store cells `start..=end`.
    fn cells(&self, start: usize, end: usize) -> Vec<i32> {
        self.inner.store().cells(start, end).to_vec()
    }

    /// Entry cell of the next program to be compiled.
    #[getter]
    fn origin(&self) -> usize {
        self.inner.store().origin
    }

    /// Variables F0..F9.
    #[getter]
    fn variables(&self) -> Vec<f32> {
        // slot 10 holds F0
        let v = self.inner.runtime().vars();
        std::iter::once(v[9])
            .chain(v[..9].iter().copied())
            .collect()
    }

    /// "completed", "interrupted", an error message, or None before any run.
    #[getter]
    fn last_outcome(&self) -> Option<String> {
        self.inner.last_outcome().map(|o| match o {
            RunOutcome::Completed => "completed".to_string(),
            RunOutcome::Interrupted => "interrupted".to_string(),
            RunOutcome::Failed(code) => code.message().to_string(),
        })
    }

    /// Structural check of the program occupying `origin..end`.
    fn check_program(&self, origin: usize, end: usize) -> PyResult<()> {
        self.inner
            .check_program(origin, end)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// A1 code of a glyph, or None outside the repertoire.
#[pyfunction]
fn a1_of(glyph: char) -> Option<i16> {
    reca::a1_of(glyph).map(|w| w.0)
}

/// Dispatch-table index (1..=128) of a symbol such as "F" or "'/".
#[pyfunction]
fn symbol_code(symbol: &str) -> PyResult<usize> {
    if symbol.is_empty() || symbol.chars().any(|c| reca::a1_of(c).is_none()) {
        return Err(PyValueError::new_err(format!("not a symbol: {symbol:?}")));
    }
    Ok(core_symbol_code(symbol))
}

/// The 13-character scientific field for `v`.
#[pyfunction]
fn format_scientific(v: f32) -> String {
    format_scientific_text(v)
}

/// Parses a free-format number from the start of `text`; returns the value
/// and the terminating character.
#[pyfunction]
fn parse_number(text: &str) -> PyResult<(f32, char)> {
    let charset = Charset::default();
    let mut r = CardReader::new(charset.clone());
    r.attach(InputUnit::Card, Box::new(Deck::new(text)));
    let mut w = LineWriter::new(Transcript::default(), charset.clone());
    let p = core_parse(ParseMode::FloatSilent, &mut r, &mut w)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((p.float_value, charset.decode(p.terminator)))
}

/// Object-listing lines for a run of cells.
#[pyfunction]
fn dump_listing(cells: Vec<i32>) -> Vec<String> {
    dump_cells(&cells)
}

#[pymodule]
fn reca_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RunResult>()?;
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(run_deck, m)?)?;
    m.add_function(wrap_pyfunction!(a1_of, m)?)?;
    m.add_function(wrap_pyfunction!(symbol_code, m)?)?;
    m.add_function(wrap_pyfunction!(format_scientific, m)?)?;
    m.add_function(wrap_pyfunction!(parse_number, m)?)?;
    m.add_function(wrap_pyfunction!(dump_listing, m)?)?;
    Ok(())
}
