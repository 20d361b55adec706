//! Character currency of the system.
//!
//! Every character travels as an [`A1Word`]: the EBCDIC octet in the high
//! byte and an EBCDIC blank (0x40) in the low byte, read as a signed 16-bit
//! integer. Dispatch tables are indexed by the six-bit code derived from the
//! low six bits of the octet. Text enters and leaves through a [`Charset`],
//! which knows the printable 029 keypunch repertoire.

use std::fmt;

/// The printable keypunch repertoire as `(text char, EBCDIC octet)`.
///
/// Ordered by six-bit code. Code 43 (EBCDIC 0x6A) has no glyph on the 029.
pub const GLYPHS: [(char, u8); 63] = [
    (' ', 0x40),
    ('A', 0xC1),
    ('B', 0xC2),
    ('C', 0xC3),
    ('D', 0xC4),
    ('E', 0xC5),
    ('F', 0xC6),
    ('G', 0xC7),
    ('H', 0xC8),
    ('I', 0xC9),
    ('¢', 0x4A),
    ('.', 0x4B),
    ('<', 0x4C),
    ('(', 0x4D),
    ('+', 0x4E),
    ('|', 0x4F),
    ('&', 0x50),
    ('J', 0xD1),
    ('K', 0xD2),
    ('L', 0xD3),
    ('M', 0xD4),
    ('N', 0xD5),
    ('O', 0xD6),
    ('P', 0xD7),
    ('Q', 0xD8),
    ('R', 0xD9),
    ('!', 0x5A),
    ('$', 0x5B),
    ('*', 0x5C),
    (')', 0x5D),
    (';', 0x5E),
    ('¬', 0x5F),
    ('-', 0x60),
    ('/', 0x61),
    ('S', 0xE2),
    ('T', 0xE3),
    ('U', 0xE4),
    ('V', 0xE5),
    ('W', 0xE6),
    ('X', 0xE7),
    ('Y', 0xE8),
    ('Z', 0xE9),
    (',', 0x6B),
    ('%', 0x6C),
    ('_', 0x6D),
    ('>', 0x6E),
    ('?', 0x6F),
    ('0', 0xF0),
    ('1', 0xF1),
    ('2', 0xF2),
    ('3', 0xF3),
    ('4', 0xF4),
    ('5', 0xF5),
    ('6', 0xF6),
    ('7', 0xF7),
    ('8', 0xF8),
    ('9', 0xF9),
    (':', 0x7A),
    ('#', 0x7B),
    ('@', 0x7C),
    ('\'', 0x7D),
    ('=', 0x7E),
    ('"', 0x7F),
];

/// A character as held in memory: `ebcdic * 256 + 64`, two's complement.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct A1Word(pub i16);

impl A1Word {
    pub const BLANK: A1Word = A1Word(16448);
    pub const QUOTE: A1Word = A1Word(32064);
    pub const LPAREN: A1Word = A1Word(19776);
    pub const RPAREN: A1Word = A1Word(23872);
    pub const EQUALS: A1Word = A1Word(32320);
    pub const MINUS: A1Word = A1Word(24640);
    pub const PLUS: A1Word = A1Word(20032);
    pub const AMPERSAND: A1Word = A1Word(20544);
    pub const PERIOD: A1Word = A1Word(19264);
    pub const SLASH: A1Word = A1Word(24896);
    pub const ASTERISK: A1Word = A1Word(23616);
    pub const LETTER_C: A1Word = A1Word(-15552);
    pub const LETTER_E: A1Word = A1Word(-15040);
    pub const LETTER_L: A1Word = A1Word(-11456);
    pub const DIGIT_ZERO: A1Word = A1Word(-4032);
    pub const PERCENT: A1Word = A1Word(27712);
    pub const LOZENGE: A1Word = A1Word(19520);
    pub const AT_SIGN: A1Word = A1Word(31808);
    pub const NUMBER_SIGN: A1Word = A1Word(31552);

    pub const fn from_ebcdic(octet: u8) -> A1Word {
        A1Word(((octet as u16) << 8 | 0x40) as i16)
    }

    pub const fn ebcdic(self) -> u8 {
        ((self.0 as u16) >> 8) as u8
    }

    /// Six-bit dispatch code in 1..=64.
    pub const fn six_bit(self) -> SixBitCode {
        SixBitCode((self.ebcdic() & 63) + 1)
    }

    /// The A1 form of decimal digit `d` (0..=9).
    pub const fn digit(d: u8) -> A1Word {
        A1Word(d as i16 * 256 - 4032)
    }

    /// True exactly for the ten digit glyphs, using the sign-interval test
    /// the number converter relies on.
    pub const fn is_digit(self) -> bool {
        self.0 < 0 && self.0 as i32 + 4032 >= 0
    }

    pub fn digit_value(self) -> Option<u8> {
        self.is_digit()
            .then(|| ((self.0 as i32 + 4032) / 256) as u8)
    }
}

impl fmt::Debug for A1Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match glyph_of_ebcdic(self.ebcdic()) {
            Some(c) => write!(f, "A1Word({} {:?})", self.0, c),
            None => write!(f, "A1Word({})", self.0),
        }
    }
}

/// Index into the dispatch tables: 1..=64 plain, 65..=128 after a quote.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SixBitCode(pub u8);

impl SixBitCode {
    pub const BLANK: SixBitCode = SixBitCode(1);

    /// Moves a plain code into the upper half of the tables.
    pub fn quote_extend(self) -> SixBitCode {
        debug_assert!((1..=64).contains(&self.0));
        SixBitCode(self.0 + 64)
    }

    pub fn is_extended(self) -> bool {
        self.0 > 64
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

fn glyph_of_ebcdic(octet: u8) -> Option<char> {
    GLYPHS.iter().find(|&&(_, e)| e == octet).map(|&(c, _)| c)
}

fn ebcdic_of_glyph(c: char) -> Option<u8> {
    GLYPHS.iter().find(|&&(g, _)| g == c).map(|&(_, e)| e)
}

/// A1 word of a glyph in the repertoire.
pub fn a1_of(glyph: char) -> Option<A1Word> {
    ebcdic_of_glyph(glyph).map(A1Word::from_ebcdic)
}

/// Maps the 029 graphics `% < @ #` onto `( ) ' =`; everything else passes.
pub fn translate_keypunch(w: A1Word) -> A1Word {
    match w {
        A1Word::PERCENT => A1Word::LPAREN,
        A1Word::LOZENGE => A1Word::RPAREN,
        A1Word::AT_SIGN => A1Word::QUOTE,
        A1Word::NUMBER_SIGN => A1Word::EQUALS,
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharsetError {
    #[error("substitute {substitute:?} for {glyph:?} collides with another glyph")]
    SubstituteCollision { glyph: char, substitute: char },
    #[error("character {0:?} is not in the keypunch repertoire")]
    Unmappable(char),
}

/// Text boundary codec.
///
/// The cent and not signs have no ASCII form, so each may be given a
/// substitute. Input accepts either the glyph or its substitute; output
/// writes the substitute.
#[derive(Debug, Clone)]
pub struct Charset {
    cent: char,
    not: char,
    strict: bool,
}

impl Default for Charset {
    fn default() -> Self {
        Charset {
            cent: '¢',
            not: '~',
            strict: false,
        }
    }
}

impl Charset {
    pub fn new(cent: char, not: char) -> Result<Charset, CharsetError> {
        for (glyph, substitute) in [('¢', cent), ('¬', not)] {
            if substitute != glyph && ebcdic_of_glyph(substitute).is_some() {
                return Err(CharsetError::SubstituteCollision { glyph, substitute });
            }
        }
        if cent == not {
            return Err(CharsetError::SubstituteCollision {
                glyph: '¬',
                substitute: not,
            });
        }
        Ok(Charset {
            cent,
            not,
            strict: false,
        })
    }

    /// Rejects characters outside the repertoire instead of blanking them.
    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Decodes one text character.
    ///
    /// Lowercase letters are upcased. Anything else outside the repertoire
    /// becomes a blank and is reported through `Err` when strict, or via the
    /// returned flag otherwise.
    pub fn encode(&self, c: char) -> Result<(A1Word, bool), CharsetError> {
        let c = if c == self.cent {
            '¢'
        } else if c == self.not {
            '¬'
        } else {
            c.to_ascii_uppercase()
        };
        match a1_of(c) {
            Some(w) => Ok((w, true)),
            None if self.strict => Err(CharsetError::Unmappable(c)),
            None => Ok((A1Word::BLANK, false)),
        }
    }

    pub fn decode(&self, w: A1Word) -> char {
        match glyph_of_ebcdic(w.ebcdic()) {
            Some('¢') => self.cent,
            Some('¬') => self.not,
            Some(c) => c,
            None => '?',
        }
    }

    pub fn decode_all(&self, words: &[A1Word]) -> String {
        words.iter().map(|&w| self.decode(w)).collect()
    }

    /// Encodes a text line, blanking anything unmappable.
    pub fn encode_lossy(&self, text: &str) -> Vec<A1Word> {
        text.chars()
            .map(|c| self.encode(c).map(|(w, _)| w).unwrap_or(A1Word::BLANK))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn a1(c: char) -> A1Word {
        a1_of(c).unwrap()
    }

    #[test]
    fn listed_equivalents() {
        let table = [
            (' ', 16448),
            ('(', 19776),
            (')', 23872),
            ('\'', 32064),
            ('=', 32320),
            ('-', 24640),
            ('.', 19264),
            ('/', 24896),
            ('+', 20032),
            ('&', 20544),
            ('E', -15040),
            ('C', -15552),
            ('L', -11456),
            ('*', 23616),
            ('%', 27712),
            ('<', 19520),
            ('@', 31808),
            ('#', 31552),
            ('0', -4032),
        ];
        for (c, v) in table {
            assert_eq!(a1(c).0, v, "{c:?}");
        }
    }

    #[test]
    fn nine_wraps_negative() {
        // 0xF9 * 256 + 64 = 63808, which is -1728 as a signed word
        assert_eq!(a1('9').0, (63808i32 - 65536) as i16);
        assert_eq!(a1('9').0, -1728);
    }

    #[test]
    fn six_bit_examples() {
        assert_eq!(a1('0').six_bit(), SixBitCode(49));
        assert_eq!(a1('9').six_bit(), SixBitCode(58));
        assert_eq!(A1Word::BLANK.six_bit(), SixBitCode(1));
        assert_eq!(a1('N').six_bit(), SixBitCode(22));
        assert_eq!(a1('$').six_bit(), SixBitCode(28));
        assert_eq!(a1('S').six_bit(), SixBitCode(35));
        assert_eq!(a1('R').six_bit(), SixBitCode(26));
    }

    #[test]
    fn quote_extension() {
        assert_eq!(a1('R').six_bit().quote_extend(), SixBitCode(90));
        assert_eq!(a1('/').six_bit().quote_extend(), SixBitCode(98));
        assert_eq!(SixBitCode::BLANK.quote_extend(), SixBitCode(65));
    }

    #[test]
    fn six_bit_codes_are_distinct() {
        let codes: HashSet<_> = GLYPHS
            .iter()
            .map(|&(_, e)| A1Word::from_ebcdic(e).six_bit())
            .collect();
        assert_eq!(codes.len(), GLYPHS.len());
        assert!(!codes.contains(&SixBitCode(43)));
        assert!(codes.iter().all(|c| (1..=64).contains(&c.0)));
    }

    #[test]
    fn text_and_ebcdic_are_bijective() {
        let chars: HashSet<_> = GLYPHS.iter().map(|g| g.0).collect();
        let octets: HashSet<_> = GLYPHS.iter().map(|g| g.1).collect();
        assert_eq!(chars.len(), GLYPHS.len());
        assert_eq!(octets.len(), GLYPHS.len());
    }

    #[test]
    fn digit_predicate_matches_digits() {
        for &(c, e) in GLYPHS.iter() {
            let w = A1Word::from_ebcdic(e);
            assert_eq!(w.is_digit(), c.is_ascii_digit(), "{c:?}");
            if let Some(d) = w.digit_value() {
                assert_eq!(char::from(b'0' + d), c);
                assert_eq!(A1Word::digit(d), w);
            }
        }
    }

    #[test]
    fn keypunch_translation() {
        assert_eq!(translate_keypunch(A1Word(27712)), A1Word(19776));
        assert_eq!(translate_keypunch(A1Word(31552)), A1Word(32320));
        assert_eq!(translate_keypunch(a1('<')), a1(')'));
        assert_eq!(translate_keypunch(a1('@')), a1('\''));
        assert_eq!(translate_keypunch(a1('A')), a1('A'));
        for &(_, e) in GLYPHS.iter() {
            let w = A1Word::from_ebcdic(e);
            assert_eq!(
                translate_keypunch(translate_keypunch(w)),
                translate_keypunch(w)
            );
        }
    }

    #[test]
    fn codec_upcases_and_blanks() {
        let cs = Charset::default();
        assert_eq!(cs.encode('a').unwrap(), (a1('A'), true));
        assert_eq!(cs.encode('\t').unwrap(), (A1Word::BLANK, false));
        assert_eq!(cs.encode('~').unwrap().0, a1('¬'));
        assert_eq!(cs.decode(a1('¬')), '~');
        assert_eq!(cs.decode(a1('¢')), '¢');
        assert!(Charset::default().strict(true).encode('{').is_err());
    }

    #[test]
    fn substitutes_must_not_collide() {
        assert!(Charset::new('^', '~').is_ok());
        assert!(matches!(
            Charset::new('A', '~'),
            Err(CharsetError::SubstituteCollision { .. })
        ));
        assert!(Charset::new('^', '^').is_err());
    }
}
