//! Text form of plane systems: `"<d>; <m>[^<count>][, ...]"`.
//!
//! Whitespace is insignificant. `"4; 2^5"` is quartics double at five
//! points; `"2;"` is all conics.

use std::fmt;

use specialsys::{DivisorClass, SystemSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A parsed system: degree and multiplicities in the order written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemNotation {
    pub degree: i64,
    pub mults: Vec<i64>,
}

impl SystemNotation {
    pub fn class(&self) -> DivisorClass {
        DivisorClass::new(self.degree, self.mults.clone())
    }

    /// Multiplicities sorted descending, zeros dropped.
    pub fn canonical_mults(&self) -> Vec<i64> {
        let mut ms: Vec<i64> = self.mults.iter().copied().filter(|&m| m != 0).collect();
        ms.sort_unstable_by(|a, b| b.cmp(a));
        ms
    }

    /// Plane system with every multiplicity-2 point counted as an extra
    /// double point. The full class lists the other points first (sorted
    /// descending) and the double points last.
    pub fn plane_spec(&self) -> SystemSpec {
        SystemSpec::plane_from_full(self.degree, &self.canonical_mults())
    }

    /// Canonical text: sorted descending, exponents folded, e.g. `4; 2^5`.
    pub fn render(&self) -> String {
        let folded = DivisorClass::new(self.degree, self.canonical_mults()).folded();
        // strip the surrounding parentheses of the class rendering
        folded[1..folded.len() - 1].to_string()
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            true
        } else {
            false
        }
    }

    fn integer(&mut self, what: &str) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[self.pos..];
        let mut len = 0;
        if rest.starts_with('-') || rest.starts_with('+') {
            len = 1;
        }
        len += rest[len..].bytes().take_while(u8::is_ascii_digit).count();
        let token = &rest[..len];
        if token.is_empty() || token == "-" || token == "+" {
            return Err(self.err(format!("expected {what}")));
        }
        let value: i64 = token
            .parse()
            .map_err(|_| ParseError {
                position: start,
                message: format!("{what} out of range"),
            })?;
        if value < 0 {
            return Err(ParseError {
                position: start,
                message: format!("negative {what} {value}"),
            });
        }
        self.pos += len;
        Ok(value)
    }
}

/// Most points a notation may expand to.
const MAX_POINTS: i64 = 10_000;

pub fn parse_system(text: &str) -> Result<SystemNotation, ParseError> {
    let mut cur = Cursor { text, pos: 0 };
    let degree = cur.integer("degree")?;
    if !cur.eat(';') {
        return Err(cur.err("expected ';' after the degree"));
    }
    let mut mults = Vec::new();
    if cur.peek().is_some() {
        loop {
            let m = cur.integer("multiplicity")?;
            let mut count = 1;
            if cur.eat('^') {
                let at = cur.pos;
                count = cur.integer("exponent")?;
                if count == 0 {
                    return Err(ParseError {
                        position: at,
                        message: "exponent must be positive".into(),
                    });
                }
            }
            if mults.len() as i64 + count > MAX_POINTS {
                return Err(cur.err(format!("more than {MAX_POINTS} points")));
            }
            mults.extend(std::iter::repeat_n(m, count as usize));
            if cur.peek().is_none() {
                break;
            }
            if !cur.eat(',') {
                return Err(cur.err("expected ',' or end of input"));
            }
        }
    }
    Ok(SystemNotation { degree, mults })
}
