//! Acceptance criteria 1-9; prints one PASS/FAIL line each.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use reca::iosys::{CardReader, LineWriter};
use reca::numio::{format_scientific_text, parse_number, ParseMode};
use reca::{a1_of, run_deck_text, Charset, Deck, InputUnit, Session, SessionConfig, Transcript};
use regex::Regex;

const FACTORIAL: &str = include_str!("decks/factorial.rec");
const SIMPSON: &str = include_str!("decks/simpson.rec");
const DAMPED: &str = include_str!("decks/damped.rec");
const ROSE: &str = include_str!("decks/rose.rec");

const FACTORIAL_LISTING: [&str; 2] = [
    "      0    -22      5     20    -49     11    -20    -98      1     20    -24",
    "    -98      2    -33    -90     19    -29     20      0      1",
];

const FACTORIAL_TABLE: [&str; 10] = [
    "  1.00000E 00  1.00000E 00",
    "  2.00000E 00  2.00000E 00",
    "  3.00000E 00  6.00000E 00",
    "  4.00000E 00  2.40000E 01",
    "  5.00000E 00  1.20000E 02",
    "  6.00000E 00  7.20000E 02",
    "  7.00000E 00  5.04000E 03",
    "  8.00000E 00  4.03200E 04",
    "  9.00000E 00  3.62880E 05",
    "  1.00000E 01  3.62880E 06",
];

/// Second column of the reference damped-oscillation table.
const DAMPED_PRINTED: [f64; 51] = [
    0.0,
    4.15826E-01,
    7.15906E-01,
    8.52504E-01,
    8.13425E-01,
    6.21304E-01,
    3.26253E-01,
    -6.13488E-03,
    -3.08735E-01,
    -5.25927E-01,
    -6.23300E-01,
    -5.92444E-01,
    -4.50328E-01,
    -2.33855E-01,
    8.95249E-03,
    2.29140E-01,
    3.86318E-01,
    4.55686E-01,
    4.31465E-01,
    3.26366E-01,
    1.67559E-01,
    -9.79736E-03,
    -1.70005E-01,
    -2.83736E-01,
    -3.33121E-01,
    -3.14203E-01,
    -2.36499E-01,
    -1.20008E-01,
    9.53147E-03,
    1.26089E-01,
    2.08370E-01,
    2.43504E-01,
    2.28793E-01,
    1.71356E-01,
    8.59142E-02,
    -8.69345E-03,
    -9.34868E-02,
    -1.53006E-01,
    -1.77983E-01,
    -1.66588E-01,
    -1.24142E-01,
    -6.14790E-02,
    7.61194E-03,
    6.92922E-02,
    1.12341E-01,
    1.30083E-01,
    1.21286E-01,
    8.99251E-02,
    4.39726E-02,
    -6.47955E-03,
    -5.13438E-02,
];

const NUMBER: &str = r"-?\d\.\d{5}E[ -]\d\d";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Debug builds get a looser time budget.
fn budget(ms: u64) -> Duration {
    let scale = if cfg!(debug_assertions) { 20 } else { 1 };
    Duration::from_millis(ms * scale)
}

fn timed(ms: u64, deck: &str, config: SessionConfig) -> Result<(Transcript, Duration), String> {
    let start = Instant::now();
    let (t, _) = run_deck_text(deck, config);
    let took = start.elapsed();
    if took > budget(ms) {
        return Err(format!("took {took:?}, budget {:?}", budget(ms)));
    }
    Ok((t, took))
}

fn parse_field(s: &str) -> f64 {
    s.trim()
        .replace("E ", "E")
        .parse()
        .expect("formatted number")
}

fn criterion_1() -> Outcome {
    let (t, took) = timed(10, FACTORIAL, SessionConfig::default())?;
    let lines = t.lines();
    let at = lines
        .iter()
        .position(|l| *l == FACTORIAL_LISTING[0])
        .ok_or("first listing line missing")?;
    if lines.get(at + 1) != Some(&FACTORIAL_LISTING[1]) {
        return Err(format!("second listing line is {:?}", lines.get(at + 1)));
    }
    Ok(format!("20-cell listing byte-identical ({took:?})"))
}

fn criterion_2() -> Outcome {
    let (t, took) = timed(10, FACTORIAL, SessionConfig::default())?;
    let rows: Vec<&str> = t
        .lines()
        .into_iter()
        .filter(|l| l.starts_with("  ") && l.contains('E'))
        .collect();
    if rows != FACTORIAL_TABLE {
        return Err(format!("table differs: {rows:?}"));
    }
    Ok(format!("10 rows match ({took:?})"))
}

fn criterion_3() -> Outcome {
    let (t, took) = timed(50, SIMPSON, SessionConfig::default())?;
    let line = t
        .lines()
        .into_iter()
        .rev()
        .find(|l| l.starts_with("PI="))
        .ok_or("no PI= line")?
        .to_string();
    let v = parse_field(&line[3..]);
    if (v - PI).abs() > 2e-4 {
        return Err(format!("{line} is off by {}", (v - PI).abs()));
    }
    Ok(format!("{} ({took:?})", line.trim_end()))
}

fn criterion_4() -> Outcome {
    let (t, took) = timed(50, DAMPED, SessionConfig::default())?;
    let row = Regex::new(&format!(r"^ +({NUMBER}) +({NUMBER})")).unwrap();
    let lines = t.lines();
    let rows: Vec<(f64, f64, &str)> = lines
        .iter()
        .filter_map(|l| row.captures(l))
        .map(|c| {
            let line = c.get(0).unwrap().as_str();
            (parse_field(&c[1]), parse_field(&c[2]), line)
        })
        .collect();
    if rows.len() != 51 {
        return Err(format!("{} rows", rows.len()));
    }
    if rows[0].2 != "  0.00000E 00  0.00000E 00" {
        return Err(format!("row 1 is {:?}", rows[0].2));
    }
    for (k, &(x, y, _)) in rows.iter().enumerate() {
        let want_x = 0.15 * k as f64;
        if k > 0 && ((x - want_x) / want_x).abs() > 1e-4 {
            return Err(format!("row {}: x = {x}", k + 1));
        }
        let model = (3.0 * x).sin() * (-0.3 * x).exp();
        if (y - model).abs() > 5e-4 {
            return Err(format!("row {}: y = {y}, model {model}", k + 1));
        }
        if (y - DAMPED_PRINTED[k]).abs() > 1e-3 {
            return Err(format!(
                "row {}: y = {y}, printed {}",
                k + 1,
                DAMPED_PRINTED[k]
            ));
        }
    }
    Ok(format!("51 rows within tolerance ({took:?})"))
}

/// Direct evaluation of the rose program in its own order of operations.
fn rose_oracle() -> Vec<String> {
    let mut rows = Vec::new();
    let mut y = -2.0f32;
    for _ in 0..50 {
        let mut x = -2.0f32;
        let mut row = String::new();
        for _ in 0..74 {
            let s = x * x + y * y;
            let s5 = s * (s * (s * (s * s)));
            let d = (x * x - y * y) * x * y * 8.0;
            row.push(if s5 - d * d < 0.0 { '*' } else { ' ' });
            x += 0.054;
        }
        rows.push(row);
        y += 0.08;
    }
    rows
}

fn criterion_5() -> Outcome {
    let config = SessionConfig {
        echo: false,
        ..SessionConfig::default()
    };
    let (t, took) = timed(200, ROSE, config)?;
    let lines: Vec<&str> = t
        .lines()
        .into_iter()
        .filter(|l| !l.starts_with('*'))
        .collect();
    if lines.len() != 50 {
        return Err(format!("{} lines", lines.len()));
    }
    for (i, (got, want)) in lines.iter().zip(rose_oracle()).enumerate() {
        if format!("{got:<74}") != want {
            return Err(format!("line {}:\n got  {got:?}\n want {want:?}", i + 1));
        }
    }
    Ok(format!("50 lines match the oracle ({took:?})"))
}

fn marker_count(program: &str) -> usize {
    let config = SessionConfig {
        echo: false,
        ..SessionConfig::default()
    };
    let (t, _) = run_deck_text(&format!("*\n{program}\n*T\n"), config);
    t.lines()
        .into_iter()
        .filter(|l| !l.starts_with('*'))
        .map(|l| l.matches('A').count())
        .sum()
}

fn criterion_6() -> Outcome {
    for n in [1, 2, 5, 50] {
        let before = marker_count(&format!("(${n}$''A'.)"));
        let after = marker_count(&format!("(''A'${n}$.)"));
        if before != n || after != n + 1 {
            return Err(format!("n = {n}: {before} and {after} markers"));
        }
    }
    Ok("counter-first runs n times, marker-first n+1".into())
}

fn error_decks() -> Vec<(&'static str, String)> {
    let long_card = format!("{}\n", "A".repeat(79));
    let constants = "'/1'".repeat(19) + "\n" + &"'/1'".repeat(12);
    vec![
        (
            "COMP 01 EXCESS NESTING",
            "(((((((((((,),),),),),),),),),),)".into(),
        ),
        (
            "COMP 02 PROGRAM LENGTH EXCEEDS CAPACITY",
            format!("({}A)", long_card.repeat(7)),
        ),
        ("COMP 03 ILLEGAL ARGUMENT", "(FA,)".into()),
        (
            "COMP 04 ILLEGAL CHARACTER ON PARENTHESIS LEVEL ZERO",
            "(,)A  Z".into(),
        ),
        ("COMP 05 NEGATIVE OR ZERO COUNTER", "($0$,)".into()),
        (
            "COMP 06 PROGRAM DEFINED CONSTANT EXCESS",
            format!("({constants},)"),
        ),
        ("COMP 07 REC/3150 OPERATOR", "('D,)".into()),
        ("CONV 01 SYNTAX ERROR IN NUMERIC DATA", "(I,)\n1.2.3".into()),
        ("SUP 01 ILLEGAL I/O UNIT NUMBER", "*O5".into()),
        ("EXEC 01 EXCESSIVE RECURSION", "*NR\n(R,)R  (R,)".into()),
        ("EXEC 02 EMPTY PUSHDOWN LIST", "(*,)".into()),
        ("EXEC 03 PUSHDOWN LIST OVERFLOW", "('/1'P.,)".into()),
        (
            "EXEC 04 RECURSIVE SUBROUTINE NOT DEFINED",
            "*NR\n(R,)".into(),
        ),
        ("EXEC 05 UNDEFINED NONRECURSIVE SUBROUTINE", "(K,)".into()),
    ]
}

fn criterion_7() -> Outcome {
    let decks = error_decks();
    for (message, body) in &decks {
        let deck = if body.starts_with('*') {
            format!("{body}\n*T\n")
        } else {
            format!("*\n{body}\n*T\n")
        };
        let (t, summary) = run_deck_text(&deck, SessionConfig::default());
        if !t.lines().iter().any(|l| l.trim_end() == *message) {
            return Err(format!("{message}: not printed; got {:?}", t.lines()));
        }
        if summary.diagnostics != 1 {
            return Err(format!("{message}: {} diagnostics", summary.diagnostics));
        }
    }
    Ok(format!("{} catalog messages triggered", decks.len()))
}

fn round_trip(v: f32) -> Result<(), TestCaseError> {
    let text = format_scientific_text(v);
    let shape = Regex::new(&format!("^ [ -]{}$", &NUMBER[2..])).unwrap();
    prop_assert!(shape.is_match(&text), "shape of {:?}", text);
    let mut r = CardReader::new(Charset::default());
    r.attach(InputUnit::Card, Box::new(Deck::new(&format!("{text},Q"))));
    let mut w = LineWriter::new(Transcript::default(), Charset::default());
    let p = parse_number(ParseMode::FloatSilent, &mut r, &mut w).unwrap();
    let back = p.float_value as f64;
    let v = v as f64;
    let err = if v == 0.0 {
        back.abs()
    } else {
        ((back - v) / v).abs()
    };
    prop_assert!(
        err <= 5.5e-6,
        "{} -> {:?} -> {} (rel {})",
        v,
        text,
        back,
        err
    );
    prop_assert_eq!(p.terminator, a1_of(',').unwrap());
    prop_assert_eq!(r.read_char().unwrap(), a1_of('Q').unwrap());
    Ok(())
}

fn criterion_8() -> Outcome {
    let values = prop_oneof![
        Just(0.0f32),
        (1.0f32..10.0, -30i32..30, any::<bool>()).prop_map(|(m, e, neg)| {
            let v = m * 10f32.powi(e);
            if neg {
                -v
            } else {
                v
            }
        }),
    ];
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&values, round_trip).map_err(|e| e.to_string())?;
    Ok("1000 round trips within 5.5e-6, shape and terminator hold".into())
}

fn atom() -> impl Strategy<Value = String> {
    const OPS: [&str; 30] = [
        "A", "B", "C", "E", "H", "M", "N", "O", "P", "Q", "W", "X", "R", "I", "+", "&", "*", "-",
        "/", "0", "J", "K", "Y", "'A", "'L", "'S", ".", ":", ",", ";",
    ];
    prop_oneof![
        6 => prop::sample::select(&OPS[..]).prop_map(str::to_string),
        1 => (0..10u8).prop_map(|d| format!("F{d}")),
        1 => (0..10u8).prop_map(|d| format!("S{d}")),
        1 => (-99i32..99).prop_map(|n| format!("'/{n}'")),
        1 => (1u32..60).prop_map(|n| format!("${n}$")),
        1 => "[A-Z]{0,4}".prop_map(|s| format!("''{s}'")),
        1 => "[A-Z0-9]".prop_map(|c| format!("={c}")),
    ]
}

/// Token sequences for one parenthesised expression body, nesting up to 9.
fn body() -> impl Strategy<Value = Vec<String>> {
    let leaf = prop::collection::vec(atom(), 0..6);
    leaf.prop_recursive(8, 64, 5, |inner| {
        prop::collection::vec(
            prop_oneof![
                atom().prop_map(|a| vec![a]),
                inner.prop_map(|b| {
                    let mut v = vec!["(".to_string()];
                    v.extend(b);
                    v.push(")".into());
                    v
                }),
            ],
            0..5,
        )
        .prop_map(|parts| parts.concat())
    })
}

/// Packs tokens onto cards without splitting any token.
fn cards(tokens: &[String]) -> String {
    let mut out = String::new();
    let mut card = String::new();
    for t in tokens {
        if card.len() + t.len() > 80 {
            out.push_str(&card);
            out.push('\n');
            card.clear();
        }
        card.push_str(t);
    }
    out.push_str(&card);
    out.push('\n');
    out
}

fn check_compiled(tokens: Vec<String>) -> Result<(), TestCaseError> {
    let mut all = vec!["(".to_string()];
    all.extend(tokens);
    all.push(")Y  ".into());
    let deck = format!("*\n{}(,)\n*T\n", cards(&all));
    let mut session = Session::new(Transcript::default(), SessionConfig::default());
    session.attach_cards(Deck::new(&deck));
    session.run().unwrap();
    prop_assert_eq!(session.diagnostics(), 0, "deck:\n{}", deck);
    let end = session.store().origin;
    prop_assert!(end >= 4);
    if let Err(e) = session.check_program(1, end) {
        return Err(TestCaseError::fail(format!("{e}\ndeck:\n{deck}")));
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 500,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&body(), check_compiled)
        .map_err(|e| e.to_string())?;
    Ok("500 random programs pass the integrity check".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("factorial object listing", criterion_1),
        ("factorial table", criterion_2),
        ("Simpson pi", criterion_3),
        ("damped oscillation", criterion_4),
        ("rose curve", criterion_5),
        ("counter semantics", criterion_6),
        ("error catalog", criterion_7),
        ("number round trips", criterion_8),
        ("exit chain integrity", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
