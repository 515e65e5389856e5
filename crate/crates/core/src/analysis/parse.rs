//! Recursive-descent parsers for potentials and Darboux candidate points.
//!
//! Potential grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' exponent)?
//! exponent:= integer | '-' integer | '(' ('-')? integer ')'
//! atom    := number | 'q' index | '(' expr ')'
//! ```
//!
//! Numbers are decimal literals (`3`, `0.25`, `1e-3`) read as exact
//! rationals; `a/b` is ordinary division. `^` binds tighter than unary minus,
//! so `-q1^2` is `-(q1^2)`. There is no implicit multiplication.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::expr::Expr;
use crate::exact::Rational;

/// Variable indices beyond this are rejected.
pub const MAX_VARIABLES: usize = 64;
/// Largest accepted `|exponent|`.
pub const MAX_EXPONENT: i32 = 64;
const MAX_DEPTH: usize = 200;
const MAX_DECIMAL_EXPONENT: i64 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected {found} at position {pos}, expected {expected}")]
    Unexpected { pos: usize, found: String, expected: String },
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("variable index must be between 1 and {MAX_VARIABLES}, got {0:?}")]
    BadVariable(String),
    #[error("exponent {0} outside [-{MAX_EXPONENT}, {MAX_EXPONENT}]")]
    ExponentTooLarge(i64),
    #[error("expression nested too deeply")]
    TooDeep,
    #[error("empty input")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(Rational),
    Int(BigInt),
    Var(usize),
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Num(r)) => format!("number {r}"),
        Some(Tok::Int(n)) => format!("number {n}"),
        Some(Tok::Var(i)) => format!("q{}", i + 1),
        Some(Tok::I) => "'i'".into(),
        Some(Tok::Plus) => "'+'".into(),
        Some(Tok::Minus) => "'-'".into(),
        Some(Tok::Star) => "'*'".into(),
        Some(Tok::Slash) => "'/'".into(),
        Some(Tok::Caret) => "'^'".into(),
        Some(Tok::LParen) => "'('".into(),
        Some(Tok::RParen) => "')'".into(),
        Some(Tok::Comma) => "','".into(),
    }
}

/// Exact value of a decimal literal such as `12`, `0.5`, `.5`, `2.5e-3`.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(p) => (&text[..p], text[p + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    if exp.abs() > MAX_DECIMAL_EXPONENT {
        return None;
    }
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rational::from_integer(digits * ten.pow(scale as u32))
    } else {
        Rational::new(digits, ten.pow((-scale) as u32))
    })
}

fn tokenize(text: &str, allow_i: bool) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut p = 0;
    while p < bytes.len() {
        let c = bytes[p];
        let start = p;
        let simple = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                p += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((start, t));
            p += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while p < bytes.len() && (bytes[p].is_ascii_digit() || bytes[p] == b'.') {
                p += 1;
            }
            // optional exponent: e or E, optional sign, digits
            if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
                let mut q = p + 1;
                if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                    q += 1;
                }
                if q < bytes.len() && bytes[q].is_ascii_digit() {
                    while q < bytes.len() && bytes[q].is_ascii_digit() {
                        q += 1;
                    }
                    p = q;
                }
            }
            let lit = &text[start..p];
            let tok = if lit.bytes().all(|b| b.is_ascii_digit()) {
                Tok::Int(lit.parse().map_err(|_| ParseError::BadNumber(lit.into()))?)
            } else {
                Tok::Num(parse_decimal(lit).ok_or_else(|| ParseError::BadNumber(lit.into()))?)
            };
            out.push((start, tok));
            continue;
        }
        if c == b'q' {
            p += 1;
            while p < bytes.len() && bytes[p].is_ascii_digit() {
                p += 1;
            }
            let idx = &text[start + 1..p];
            let n: usize = idx.parse().map_err(|_| ParseError::BadVariable(text[start..p].into()))?;
            if n == 0 || n > MAX_VARIABLES {
                return Err(ParseError::BadVariable(text[start..p].into()));
            }
            out.push((start, Tok::Var(n - 1)));
            continue;
        }
        if c == b'i' && allow_i {
            out.push((start, Tok::I));
            p += 1;
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(ParseError::Unexpected {
            pos: start,
            found: format!("{ch:?}"),
            expected: "a number, variable, operator or parenthesis".into(),
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Unexpected {
            pos: self.here(),
            found: describe(self.peek()),
            expected: expected.into(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep);
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = Expr::add(acc, self.term()?);
            } else if self.eat(&Tok::Minus) {
                acc = Expr::sub(acc, self.term()?);
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = Expr::mul(acc, self.unary()?);
            } else if self.eat(&Tok::Slash) {
                acc = Expr::div(acc, self.unary()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let out = if self.eat(&Tok::Minus) {
            Expr::neg(self.unary()?)
        } else if self.eat(&Tok::Plus) {
            self.unary()?
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(out)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let e = self.exponent()?;
        if self.peek() == Some(&Tok::Caret) {
            return Err(self.unexpected("an operator other than a second '^' (use parentheses)"));
        }
        Ok(Expr::pow(base, e))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = self.eat(&Tok::LParen);
        let neg = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let Some(Tok::Int(n)) = self.peek().cloned() else {
            return Err(self.unexpected("an integer exponent"));
        };
        self.pos += 1;
        if paren && !self.eat(&Tok::RParen) {
            return Err(self.unexpected("')'"));
        }
        let v: i64 = i64::try_from(&n).unwrap_or(i64::MAX);
        let v = if neg { -v } else { v };
        if v.abs() > i64::from(MAX_EXPONENT) {
            return Err(ParseError::ExponentTooLarge(v));
        }
        Ok(v as i32)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Const(Rational::from_integer(n)))
            }
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Expr::Const(r))
            }
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(Expr::Var(i))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.unexpected("')'"));
                }
                Ok(e)
            }
            _ => Err(self.unexpected("a number, variable or '('")),
        }
    }
}

/// Parses an expression in `q1..qN`; no homogeneity check.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_expr_with_dimension(text).map(|(e, _)| e)
}

/// Also returns the largest variable index written, which can exceed the
/// expression's own dimension when terms such as `0*q3` fold away.
pub fn parse_expr_with_dimension(text: &str) -> Result<(Expr, usize), ParseError> {
    let toks = tokenize(text, false)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let written = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Var(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        depth: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok((e, written))
}

/// A complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: Rational,
    pub im: Rational,
}

impl ExactComplex {
    pub fn real(re: Rational) -> Self {
        ExactComplex {
            re,
            im: Rational::zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_complex64(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        num_complex::Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// One real literal: integer, decimal, or `a/b` of two such literals.
fn real_literal(p: &mut Parser) -> Result<Option<Rational>, ParseError> {
    let first = match p.peek().cloned() {
        Some(Tok::Int(n)) => Rational::from_integer(n),
        Some(Tok::Num(r)) => r,
        _ => return Ok(None),
    };
    p.pos += 1;
    if p.peek() == Some(&Tok::Slash) {
        p.pos += 1;
        let den = match p.peek().cloned() {
            Some(Tok::Int(n)) => Rational::from_integer(n),
            Some(Tok::Num(r)) => r,
            _ => return Err(p.unexpected("a denominator")),
        };
        p.pos += 1;
        if den.is_zero() {
            return Err(ParseError::BadNumber("division by zero".into()));
        }
        return Ok(Some(first / den));
    }
    Ok(Some(first))
}

/// `[sign] (real ['*'] 'i' | real | 'i')`, accumulated into `acc`.
fn complex_term(p: &mut Parser, acc: &mut ExactComplex, negative: bool) -> Result<(), ParseError> {
    let value = real_literal(p)?;
    let imaginary = if value.is_some() {
        if p.eat(&Tok::Star) {
            if !p.eat(&Tok::I) {
                return Err(p.unexpected("'i'"));
            }
            true
        } else {
            p.eat(&Tok::I)
        }
    } else if p.eat(&Tok::I) {
        true
    } else {
        return Err(p.unexpected("a number or 'i'"));
    };
    let mut v = value.unwrap_or_else(|| Rational::from_integer(1.into()));
    if negative {
        v = -v;
    }
    if imaginary {
        acc.im += v;
    } else {
        acc.re += v;
    }
    Ok(())
}

fn complex_component(p: &mut Parser) -> Result<ExactComplex, ParseError> {
    let mut acc = ExactComplex::real(Rational::zero());
    let mut negative = if p.eat(&Tok::Minus) {
        true
    } else {
        p.eat(&Tok::Plus);
        false
    };
    complex_term(p, &mut acc, negative)?;
    loop {
        if p.eat(&Tok::Plus) {
            negative = false;
        } else if p.eat(&Tok::Minus) {
            negative = true;
        } else {
            return Ok(acc);
        }
        complex_term(p, &mut acc, negative)?;
    }
}

/// Parses a point such as `(-1, 0)`, `1/2, 3-2*i` or `(0.5i)`.
pub fn parse_point(text: &str) -> Result<Vec<ExactComplex>, ParseError> {
    let toks = tokenize(text, true)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        depth: 0,
    };
    let paren = p.eat(&Tok::LParen);
    let mut out = vec![complex_component(&mut p)?];
    while p.eat(&Tok::Comma) {
        out.push(complex_component(&mut p)?);
        if out.len() > MAX_VARIABLES {
            return Err(ParseError::BadVariable(format!("{} components", out.len())));
        }
    }
    if paren && !p.eat(&Tok::RParen) {
        return Err(p.unexpected("')' or ','"));
    }
    if p.pos != p.toks.len() {
        return Err(p.unexpected("end of input"));
    }
    Ok(out)
}
