//! Ket expressions such as `|20> + |02>` or `(1/sqrt(2))*|0,1> - i*|1,0>`.
//!
//! ```text
//! state := ['+'|'-'] term (('+'|'-') term)*
//! term  := [coef '*'] ket
//! ket   := '|' digit+ '>'              one digit per mode
//!        | '|' uint (',' uint)* [','] '>'  arbitrary counts; `|12,>` is one mode
//! coef  := factor (('*'|'/') factor)*
//! factor:= number | number 'i' | 'i' | 'sqrt' '(' uint ')' | '-' factor
//!        | '(' expr ')'
//! expr  := coef (('+'|'-') coef)*
//! ```
//!
//! Whitespace is ignored between tokens. Terms with the same ket are summed.

use std::fmt::Write as _;

use fockmodes_core::fock::{Occupation, PureState};
use fockmodes_core::Error as CoreError;
use num_complex::Complex64;
use thiserror::Error;

const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("ket at byte {offset} has {found} modes, expected {expected}")]
    ModeCount {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("expression describes the zero state")]
    ZeroState,
}

impl ParseError {
    /// Byte offset of the problem, when it has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::ModeCount { offset, .. } => {
                Some(*offset)
            }
            ParseError::ZeroState => None,
        }
    }
}

/// Parses and normalizes a ket expression.
pub fn parse_state(text: &str) -> Result<PureState, ParseError> {
    parse_state_raw(text)?
        .normalize()
        .map_err(|_| ParseError::ZeroState)
}

/// Parses a ket expression keeping the written coefficients.
pub fn parse_state_raw(text: &str) -> Result<PureState, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let terms = p.state()?;
    let mode_count = terms[0].0.mode_count();
    let state = PureState::from_terms(mode_count, terms).map_err(|e| match e {
        // mode counts were already checked term by term
        CoreError::Dimension { expected, found } => ParseError::ModeCount {
            offset: 0,
            expected,
            found,
        },
        _ => ParseError::ZeroState,
    })?;
    if state.is_empty() {
        return Err(ParseError::ZeroState);
    }
    Ok(state)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let at = self.pos;
            self.err(at, format!("expected '{}'", c as char))
        }
    }

    fn state(&mut self) -> Result<Vec<(Occupation, Complex64)>, ParseError> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        if self.eat(b'-') {
            sign = -1.0;
        } else {
            self.eat(b'+');
        }
        let mut modes = None;
        loop {
            let start = {
                self.skip_ws();
                self.pos
            };
            let (occ, coef) = self.term()?;
            if !(coef.re.is_finite() && coef.im.is_finite()) {
                return self.err(start, "coefficient is not finite");
            }
            match modes {
                None => modes = Some(occ.mode_count()),
                Some(m) if m != occ.mode_count() => {
                    return Err(ParseError::ModeCount {
                        offset: start,
                        expected: m,
                        found: occ.mode_count(),
                    })
                }
                _ => {}
            }
            terms.push((occ, coef * sign));
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                Some(c) => {
                    let at = self.pos;
                    return self.err(at, format!("unexpected '{}'", c as char));
                }
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(Occupation, Complex64), ParseError> {
        if self.peek() == Some(b'|') {
            return Ok((self.ket()?, Complex64::new(1.0, 0.0)));
        }
        let mut coef = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    if self.peek() == Some(b'|') {
                        return Ok((self.ket()?, coef));
                    }
                    coef *= self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.factor()?;
                    coef = self.divide(coef, d, at)?;
                }
                None => {
                    let at = self.pos;
                    return self.err(at, "unexpected end of input, expected '*' and a ket");
                }
                Some(_) => {
                    let at = self.pos;
                    return self.err(at, "expected '*' before the ket");
                }
            }
        }
    }

    fn divide(&self, n: Complex64, d: Complex64, at: usize) -> Result<Complex64, ParseError> {
        if d.norm() == 0.0 {
            return self.err(at, "division by zero");
        }
        Ok(n / d)
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let at = self.pos;
            return self.err(at, "expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Complex64, ParseError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Complex64, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.factor()?;
                    acc = self.divide(acc, d, at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Complex64, ParseError> {
        self.enter()?;
        let value = self.factor_inner();
        self.depth -= 1;
        value
    }

    fn factor_inner(&mut self) -> Result<Complex64, ParseError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.src.get(at) {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || *c == b'.' => {
                let v = self.number()?;
                if self.src.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    Ok(Complex64::new(0.0, v))
                } else {
                    Ok(Complex64::new(v, 0.0))
                }
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Complex64::new(0.0, 1.0))
            }
            Some(b's') if self.is_word_at(at, b"sqrt") => {
                self.pos += 4;
                self.expect(b'(')?;
                self.skip_ws();
                let n = self.uint()?;
                self.expect(b')')?;
                Ok(Complex64::new((n as f64).sqrt(), 0.0))
            }
            Some(c) => self.err(at, format!("unexpected '{}' in coefficient", *c as char)),
            None => self.err(at, "unexpected end of input"),
        }
    }

    fn is_word_at(&self, at: usize, word: &[u8]) -> bool {
        self.src.get(at..at + word.len()) == Some(word)
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if text != "." => Ok(v),
            _ => self.err(start, format!("malformed number '{text}'")),
        }
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected an unsigned integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<u32>()
            .or_else(|_| self.err(start, format!("integer '{text}' out of range")))
    }

    fn ket(&mut self) -> Result<Occupation, ParseError> {
        let open = self.pos;
        self.expect(b'|')?;
        let Some(len) = self.src[self.pos..].iter().position(|&c| c == b'>') else {
            return self.err(open, "unterminated ket");
        };
        let body_start = self.pos;
        let body = &self.src[body_start..body_start + len];
        let counts = if body.contains(&b',') {
            let mut counts = Vec::new();
            let mut sub = Parser {
                src: &self.src[..body_start + len],
                pos: body_start,
                depth: 0,
            };
            loop {
                sub.skip_ws();
                counts.push(sub.uint()?);
                if !sub.eat(b',') || sub.peek().is_none() {
                    break;
                }
            }
            sub.skip_ws();
            if sub.pos != body_start + len {
                return self.err(sub.pos, "unexpected character in ket");
            }
            counts
        } else {
            let mut counts = Vec::new();
            for (i, &c) in body.iter().enumerate() {
                if c.is_ascii_digit() {
                    counts.push(u32::from(c - b'0'));
                } else if !c.is_ascii_whitespace() {
                    return self.err(body_start + i, format!("unexpected '{}' in ket", c as char));
                }
            }
            counts
        };
        if counts.is_empty() {
            return self.err(open, "empty ket");
        }
        self.pos = body_start + len + 1;
        Ok(Occupation::new(counts))
    }
}

fn format_ket(occ: &Occupation) -> String {
    let counts = occ.counts();
    if counts.iter().all(|&c| c <= 9) {
        let digits: String = counts.iter().map(|c| char::from(b'0' + *c as u8)).collect();
        format!("|{digits}>")
    } else {
        let parts: Vec<String> = counts.iter().map(u32::to_string).collect();
        let trailing = if counts.len() == 1 { "," } else { "" };
        format!("|{}{trailing}>", parts.join(","))
    }
}

fn rounds_to_zero(v: f64, precision: usize) -> bool {
    format!("{:.*}", precision, v.abs())
        .chars()
        .all(|c| c == '0' || c == '.')
}

/// Renders a state in canonical basis order with the global phase fixed so
/// the first amplitude is real and positive.
pub fn format_state(state: &PureState, precision: usize) -> String {
    let state = state.canonical_phase();
    let mut out = String::new();
    let one = format!("{:.*}", precision, 1.0);
    for (i, (occ, amp)) in state.iter().enumerate() {
        let re_zero = rounds_to_zero(amp.re, precision);
        let im_zero = rounds_to_zero(amp.im, precision);
        let (negative, body) = if im_zero {
            let mag = format!("{:.*}", precision, amp.re.abs());
            (
                amp.re < 0.0 && !re_zero,
                if mag == one { None } else { Some(mag) },
            )
        } else if re_zero {
            (
                amp.im < 0.0,
                Some(format!("{:.*}i", precision, amp.im.abs())),
            )
        } else {
            let sep = if amp.im < 0.0 { '-' } else { '+' };
            (
                false,
                Some(format!(
                    "({:.*}{sep}{:.*}i)",
                    precision,
                    amp.re,
                    precision,
                    amp.im.abs()
                )),
            )
        };
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if let Some(b) = body {
            let _ = write!(out, "{b}*");
        }
        out.push_str(&format_ket(occ));
    }
    out
}
