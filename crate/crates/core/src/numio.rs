//! Free-format number input and fixed scientific output.
//!
//! Both directions work in 32-bit floating point, one character at a time,
//! through the card reader and line writer, so echoing and line breaking
//! behave exactly like any other character traffic.

use std::io;

use crate::charset::A1Word;
use crate::error::RecError;
use crate::iosys::{CardReader, LineSink, LineWriter};

/// Width of one formatted number, leading blank included.
pub const FIELD_WIDTH: usize = 13;

/// Line position beyond which a number is started on a fresh line.
const FORMAT_WRAP_COLUMN: usize = 107;

const ROUNDING: f32 = 5.0e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    /// Real conversion with echo suppressed for its duration.
    FloatSilent,
    FloatEcho,
    /// Integer conversion, always echoed (compile time only).
    IntEcho,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParseResult {
    pub float_value: f32,
    pub int_value: i32,
    /// The first character that did not fit the number; already consumed.
    pub terminator: A1Word,
}

fn next<S: LineSink>(r: &mut CardReader, w: &mut LineWriter<S>) -> Result<A1Word, RecError> {
    let c = r.read_char()?;
    w.put_char(c)?;
    Ok(c)
}

fn is_plus(c: A1Word) -> bool {
    c == A1Word::PLUS || c == A1Word::AMPERSAND
}

pub fn parse_number<S: LineSink>(
    mode: ParseMode,
    r: &mut CardReader,
    w: &mut LineWriter<S>,
) -> Result<ParseResult, RecError> {
    match mode {
        ParseMode::IntEcho => parse_integer(r, w),
        ParseMode::FloatEcho => parse_real(r, w),
        ParseMode::FloatSilent => {
            let echo = w.echo();
            w.set_echo(false);
            let result = parse_real(r, w);
            w.set_echo(echo);
            result
        }
    }
}

fn parse_real<S: LineSink>(
    r: &mut CardReader,
    w: &mut LineWriter<S>,
) -> Result<ParseResult, RecError> {
    let mut c = next(r, w)?;
    while c == A1Word::BLANK {
        c = next(r, w)?;
    }
    let mut sign = 1.0f32;
    if c == A1Word::MINUS {
        sign = -1.0;
        c = next(r, w)?;
    } else if is_plus(c) {
        c = next(r, w)?;
    }

    let mut mantissa = 0.0f32;
    // Zero until the point; afterwards counts every character read,
    // terminator included, so the fraction length is `after_point - 2`.
    let mut after_point = 0i32;
    let mut exponent = 0i32;
    let mut exponent_sign = 1i32;
    loop {
        if after_point <= 0 {
            if c == A1Word::PERIOD {
                after_point += 1;
                c = next(r, w)?;
                continue;
            }
        } else {
            after_point += 1;
        }
        if c == A1Word::LETTER_E {
            c = next(r, w)?;
            if c == A1Word::MINUS {
                exponent_sign = -1;
                c = next(r, w)?;
            } else if is_plus(c) || c == A1Word::BLANK {
                // the formatter writes a blank for a positive exponent
                c = next(r, w)?;
            }
            while let Some(d) = c.digit_value() {
                exponent = exponent.saturating_mul(10).saturating_add(d as i32);
                c = next(r, w)?;
            }
            break;
        }
        match c.digit_value() {
            Some(d) => {
                mantissa = mantissa * 10.0 + d as f32;
                c = next(r, w)?;
            }
            None => break,
        }
    }
    if after_point > 0 {
        after_point -= 2;
    }
    let scale = exponent_sign
        .saturating_mul(exponent)
        .saturating_sub(after_point);
    let magnitude = if scale < 0 {
        mantissa / 10.0f32.powi(-scale)
    } else {
        mantissa * 10.0f32.powi(scale)
    };
    Ok(ParseResult {
        float_value: sign * magnitude,
        int_value: 0,
        terminator: c,
    })
}

fn parse_integer<S: LineSink>(
    r: &mut CardReader,
    w: &mut LineWriter<S>,
) -> Result<ParseResult, RecError> {
    let mut c = next(r, w)?;
    while c == A1Word::BLANK {
        c = next(r, w)?;
    }
    let mut sign = 1i32;
    if c == A1Word::MINUS {
        sign = -1;
        c = next(r, w)?;
    } else if is_plus(c) {
        c = next(r, w)?;
    }
    let mut value = 0i32;
    while let Some(d) = c.digit_value() {
        value = value.saturating_mul(10).saturating_add(d as i32);
        c = next(r, w)?;
    }
    Ok(ParseResult {
        float_value: 0.0,
        int_value: sign * value,
        terminator: c,
    })
}

/// The thirteen glyphs ` sd.dddddEsdd` for `v`.
///
/// The second value reports a non-finite input or an exponent that had to
/// be clamped to two digits.
pub fn scientific_glyphs(v: f32) -> ([A1Word; FIELD_WIDTH], bool) {
    let mut out = [A1Word::BLANK; FIELD_WIDTH];
    if v.is_sign_negative() && v != 0.0 && !v.is_nan() {
        out[1] = A1Word::MINUS;
    }
    if !v.is_finite() {
        let stars = [2, 4, 5, 6, 7, 8, 11, 12];
        for i in stars {
            out[i] = A1Word::ASTERISK;
        }
        out[3] = A1Word::PERIOD;
        out[9] = A1Word::LETTER_E;
        return (out, true);
    }

    let mut x = v.abs();
    let mut k = 0i32;
    if x != 0.0 {
        while x < 10.0 {
            x *= 10.0;
            k -= 1;
        }
        loop {
            x *= 0.1;
            k += 1;
            if x < 10.0 {
                break;
            }
        }
    }
    x += ROUNDING;
    let mut n = x as i32;
    if n >= 10 {
        x *= 0.1;
        k += 1;
        n = x as i32;
    }
    out[2] = A1Word::digit(n.clamp(0, 9) as u8);
    out[3] = A1Word::PERIOD;
    for slot in out.iter_mut().skip(4).take(5) {
        x = 10.0 * (x - n as f32);
        n = x as i32;
        *slot = A1Word::digit(n.clamp(0, 9) as u8);
    }
    out[9] = A1Word::LETTER_E;
    if k < 0 {
        out[10] = A1Word::MINUS;
        k = -k;
    }
    let clamped = k > 99;
    let k = k.min(99);
    out[11] = A1Word::digit((k / 10) as u8);
    out[12] = A1Word::digit((k % 10) as u8);
    (out, clamped)
}

/// Text form of [`scientific_glyphs`].
pub fn format_scientific_text(v: f32) -> String {
    let charset = crate::charset::Charset::default();
    charset.decode_all(&scientific_glyphs(v).0)
}

/// Writes `v` through the line writer, starting a new line first when the
/// field would not fit on a printer line. Returns the glyphs written and
/// whether the value could not be represented.
pub fn format_scientific<S: LineSink>(
    v: f32,
    w: &mut LineWriter<S>,
) -> io::Result<([A1Word; FIELD_WIDTH], bool)> {
    if w.cursor() > FORMAT_WRAP_COLUMN {
        w.flush_line()?;
    }
    let (glyphs, flagged) = scientific_glyphs(v);
    for g in glyphs {
        w.put_char(g)?;
    }
    Ok((glyphs, flagged))
}
