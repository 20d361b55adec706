use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn reca(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_reca"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn deck(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "decks", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn scratch(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("reca-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn runs_a_deck_file() {
    let out = reca(&[&deck("factorial.rec")], "");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("  1.00000E 01  3.62880E 06\n"));
    assert!(text.contains('\u{c}'));
}

#[test]
fn diagnostics_exit_one() {
    let path = scratch("diag.rec", "*\n(*,)\n*T\n");
    let out = reca(&[&path], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("EXEC 02"));
}

#[test]
fn missing_deck_exits_two() {
    let out = reca(&["/nonexistent/deck.rec"], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn interactive_reads_stdin() {
    let out = reca(&["-i", "--no-echo"], "*\n(''HI',)\n*T\n");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .any(|l| l == "HI"));
}

#[test]
fn step_budget_flag() {
    let out = reca(&["-i", "--no-echo", "--max-steps", "10"], "*\n(.)\n*T\n");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("MANUAL INTERRUPT FROM SWITCH  5"));
}

#[test]
fn punch_file_and_tagged_stdout() {
    let path = scratch("punch.rec", "*O2\n(''CARD',)\n*T\n");
    let out = reca(&["--no-echo", &path], "");
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("[punch] CARD"));

    let punch = scratch("punch.out", "");
    let out = reca(&["--no-echo", "--punch", &punch, &path], "");
    assert!(!String::from_utf8(out.stdout).unwrap().contains("CARD"));
    assert_eq!(std::fs::read_to_string(&punch).unwrap(), "CARD\n");
}

#[test]
fn strict_charset_rejects_unknown_glyphs() {
    let path = scratch("strict.rec", "*\n(''{',)\n*T\n");
    assert_eq!(reca(&[&path], "").status.code(), Some(0));
    assert_eq!(
        reca(&["--strict-charset", &path], "").status.code(),
        Some(2)
    );
}

#[test]
fn rejects_bad_width() {
    assert_eq!(reca(&["--width", "90"], "").status.code(), Some(2));
}
