//! Recursive-descent parser.
//!
//! Binding strength, loosest first: `|`, `^`, `&`, `<<`, `+ -`, `*`,
//! prefix `- ~`, `**` (right associative). A shift `a << b` is read as
//! `a * 2**b`; binary `a - b` becomes `a + (-1)*b`.

use super::{and, constant, not, or, power, product, sum, xor, Expr, Width};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected {found} at position {pos}, expected {expected}")]
    Unexpected { pos: usize, found: String, expected: &'static str },
    #[error("unexpected end of input, expected {expected}")]
    UnexpectedEnd { expected: &'static str },
    #[error("invalid character {ch:?} at position {pos}")]
    BadChar { pos: usize, ch: char },
    #[error("malformed number at position {pos}")]
    BadNumber { pos: usize },
}

impl ParseError {
    /// Byte offset of the error, if it has one.
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Unexpected { pos, .. }
            | ParseError::BadChar { pos, .. }
            | ParseError::BadNumber { pos } => Some(*pos),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    StarStar,
    Amp,
    Caret,
    Pipe,
    Tilde,
    Shl,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::StarStar => "`**`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Shl => "`<<`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' if bytes.get(i + 1) == Some(&b'*') => {
                i += 1;
                Tok::StarStar
            }
            b'*' => Tok::Star,
            b'&' => Tok::Amp,
            b'^' => Tok::Caret,
            b'|' => Tok::Pipe,
            b'~' => Tok::Tilde,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'<' if bytes.get(i + 1) == Some(&b'<') => {
                i += 1;
                Tok::Shl
            }
            b'0'..=b'9' => {
                let (value, end) = lex_number(bytes, i)?;
                out.push((start, Tok::Num(value)));
                i = end;
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = i + 1;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                out.push((start, Tok::Ident(src[i..end].to_string())));
                i = end;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::BadChar { pos: i, ch });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Lexes a decimal or `0x` literal, wrapping modulo 2^64.
fn lex_number(bytes: &[u8], start: usize) -> Result<(u64, usize), ParseError> {
    let hex = bytes[start] == b'0' && matches!(bytes.get(start + 1), Some(b'x' | b'X'));
    let (radix, mut i) = if hex { (16u64, start + 2) } else { (10u64, start) };
    let digits_start = i;
    let mut value = 0u64;
    while i < bytes.len() {
        let d = match (bytes[i] as char).to_digit(radix as u32) {
            Some(d) => d as u64,
            None => break,
        };
        value = value.wrapping_mul(radix).wrapping_add(d);
        i += 1;
    }
    if i == digits_start || (i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')) {
        return Err(ParseError::BadNumber { pos: start });
    }
    Ok((value, i))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    w: Width,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &'static str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((pos, t)) => ParseError::Unexpected { pos: *pos, found: t.describe(), expected },
            None => ParseError::UnexpectedEnd { expected },
        }
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let mut ops = vec![self.xor()?];
        while self.eat(&Tok::Pipe) {
            ops.push(self.xor()?);
        }
        Ok(if ops.len() == 1 { ops.pop().unwrap() } else { or(ops, self.w) })
    }

    fn xor(&mut self) -> Result<Expr, ParseError> {
        let mut ops = vec![self.and()?];
        while self.eat(&Tok::Caret) {
            ops.push(self.and()?);
        }
        Ok(if ops.len() == 1 { ops.pop().unwrap() } else { xor(ops, self.w) })
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut ops = vec![self.shift()?];
        while self.eat(&Tok::Amp) {
            ops.push(self.shift()?);
        }
        Ok(if ops.len() == 1 { ops.pop().unwrap() } else { and(ops, self.w) })
    }

    fn shift(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.sum()?;
        while self.eat(&Tok::Shl) {
            let rhs = self.sum()?;
            let scale = power(Expr::Const(2), rhs, self.w);
            lhs = product(vec![lhs, scale], self.w);
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.prod()?];
        loop {
            if self.eat(&Tok::Plus) {
                terms.push(self.prod()?);
            } else if self.eat(&Tok::Minus) {
                let t = self.prod()?;
                terms.push(negate(t, self.w));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { sum(terms, self.w) })
    }

    fn prod(&mut self) -> Result<Expr, ParseError> {
        let mut fs = vec![self.unary()?];
        while self.eat(&Tok::Star) {
            fs.push(self.unary()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { product(fs, self.w) })
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            let e = self.unary()?;
            Ok(negate(e, self.w))
        } else if self.eat(&Tok::Tilde) {
            let e = self.unary()?;
            Ok(not(e, self.w))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(&Tok::StarStar) {
            let exp = self.unary()?;
            Ok(power(base, exp, self.w))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(constant(v, self.w))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::var(&name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.or()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("`)`"));
                }
                Ok(e)
            }
            _ => Err(self.error("an operand")),
        }
    }
}

fn negate(e: Expr, w: Width) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(w.neg(c)),
        other => product(vec![Expr::Const(w.minus_one()), other], w),
    }
}

/// Parses `source` as an expression over `w`-bit words.
pub fn parse(source: &str, w: Width) -> Result<Expr, ParseError> {
    let toks = tokenize(source)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser { toks, pos: 0, w };
    let e = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}
