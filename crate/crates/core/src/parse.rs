//! Text grammar for ternary quartics.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/')? factor)*        juxtaposition multiplies
//! factor := ('+' | '-') factor | power
//! power  := atom ('^' integer)?
//! atom   := number | 'x' | 'y' | 'z' | '(' expr ')'
//! ```
//!
//! Numbers are integers or decimals and become exact rationals. Division is
//! only allowed by a nonzero constant.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::FormError;
use crate::form::{Exponents, TernaryQuartic};

const MAX_DEGREE: u32 = 64;

/// Parse and expand a quartic with exact rational coefficients.
pub fn parse_quartic(text: &str) -> Result<TernaryQuartic<BigRational>, FormError> {
    let poly = parse_polynomial(text)?;
    if let Some(d) = poly.keys().map(|e| e.iter().sum::<u32>()).find(|d| *d != 4) {
        return Err(FormError::NotHomogeneous { expected: 4, found: d });
    }
    TernaryQuartic::from_terms(poly)
}

/// Parse a (not necessarily homogeneous) polynomial into its nonzero terms.
pub fn parse_polynomial(text: &str) -> Result<BTreeMap<Exponents, BigRational>, FormError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let poly = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(syntax(tok.pos, format!("unexpected {}", tok.kind.describe())));
    }
    Ok(poly.0)
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Number(BigRational),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Number(n) => format!("number {n}"),
            Kind::Var(v) => format!("variable {}", ["x", "y", "z"][*v]),
            Kind::Plus => "'+'".into(),
            Kind::Minus => "'-'".into(),
            Kind::Star => "'*'".into(),
            Kind::Slash => "'/'".into(),
            Kind::Caret => "'^'".into(),
            Kind::LParen => "'('".into(),
            Kind::RParen => "')'".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> FormError {
    FormError::Syntax { position, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<Token>, FormError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let lit = &text[start..i];
                out.push(Token { kind: Kind::Number(parse_decimal(lit, start)?), pos: start });
                continue;
            }
            b'x' | b'X' => Kind::Var(0),
            b'y' | b'Y' => Kind::Var(1),
            b'z' | b'Z' => Kind::Var(2),
            b'+' => Kind::Plus,
            b'-' => Kind::Minus,
            b'*' => Kind::Star,
            b'/' => Kind::Slash,
            b'^' => Kind::Caret,
            b'(' => Kind::LParen,
            b')' => Kind::RParen,
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character '{ch}'")));
            }
        };
        out.push(Token { kind, pos: i });
        i += 1;
    }
    Ok(out)
}

fn parse_decimal(lit: &str, pos: usize) -> Result<BigRational, FormError> {
    let (int_part, frac_part) = match lit.split_once('.') {
        Some((a, b)) => (a, b),
        None => (lit, ""),
    };
    if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(syntax(pos, format!("malformed number '{lit}'")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| syntax(pos, format!("malformed number '{lit}'")))?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(numer, denom))
}

#[derive(Debug, Clone, Default)]
struct Poly(BTreeMap<Exponents, BigRational>);

impl Poly {
    fn constant(c: BigRational) -> Self {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert([0, 0, 0], c);
        }
        p
    }

    fn var(v: usize) -> Self {
        let mut e = [0; 3];
        e[v] = 1;
        Poly(BTreeMap::from([(e, BigRational::one())]))
    }

    fn degree(&self) -> u32 {
        self.0.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.get(&[0, 0, 0]).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, e: Exponents, c: BigRational) {
        let entry = self.0.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&e);
        }
    }

    fn add(mut self, other: Poly, sign: bool) -> Poly {
        for (e, c) in other.0 {
            self.add_term(e, if sign { c } else { -c });
        }
        self
    }

    fn neg(self) -> Poly {
        Poly(self.0.into_iter().map(|(e, c)| (e, -c)).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &other.0 {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat(&mut self, kind: &Kind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, FormError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Kind::Plus) {
                acc = acc.add(self.term()?, true);
            } else if self.eat(&Kind::Minus) {
                acc = acc.add(self.term()?, false);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, FormError> {
        let mut acc = self.factor()?;
        loop {
            let at = self.here();
            if self.eat(&Kind::Star) {
                let rhs = self.factor()?;
                acc = self.checked_mul(&acc, &rhs, at)?;
            } else if self.eat(&Kind::Slash) {
                let rhs = self.factor()?;
                let divisor = rhs
                    .as_constant()
                    .ok_or_else(|| syntax(at, "division by a non-constant expression"))?;
                if divisor.is_zero() {
                    return Err(syntax(at, "division by zero"));
                }
                acc = acc.mul(&Poly::constant(divisor.recip()));
            } else if matches!(
                self.peek().map(|t| &t.kind),
                Some(Kind::Number(_) | Kind::Var(_) | Kind::LParen)
            ) {
                let rhs = self.factor()?;
                acc = self.checked_mul(&acc, &rhs, at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn checked_mul(&self, a: &Poly, b: &Poly, at: usize) -> Result<Poly, FormError> {
        if a.degree() + b.degree() > MAX_DEGREE {
            return Err(syntax(at, format!("degree exceeds {MAX_DEGREE}")));
        }
        Ok(a.mul(b))
    }

    fn factor(&mut self) -> Result<Poly, FormError> {
        if self.eat(&Kind::Minus) {
            return Ok(self.factor()?.neg());
        }
        if self.eat(&Kind::Plus) {
            return self.factor();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, FormError> {
        let base = self.atom()?;
        if !self.eat(&Kind::Caret) {
            return Ok(base);
        }
        let at = self.here();
        let exponent = match self.peek().map(|t| t.kind.clone()) {
            Some(Kind::Number(n)) if n.is_integer() => {
                self.pos += 1;
                n.to_integer()
            }
            _ => return Err(syntax(at, "expected a non-negative integer exponent")),
        };
        let exponent: u32 = exponent
            .try_into()
            .ok()
            .filter(|e: &u32| base.degree().saturating_mul(*e) <= MAX_DEGREE)
            .ok_or_else(|| syntax(at, format!("degree exceeds {MAX_DEGREE}")))?;
        let mut out = Poly::constant(BigRational::one());
        for _ in 0..exponent {
            out = out.mul(&base);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Poly, FormError> {
        let at = self.here();
        let Some(tok) = self.peek().cloned() else {
            return Err(syntax(at, "unexpected end of input"));
        };
        self.pos += 1;
        match tok.kind {
            Kind::Number(n) => Ok(Poly::constant(n)),
            Kind::Var(v) => Ok(Poly::var(v)),
            Kind::LParen => {
                let inner = self.expr()?;
                if !self.eat(&Kind::RParen) {
                    return Err(syntax(self.here(), "expected ')'"));
                }
                Ok(inner)
            }
            other => Err(syntax(tok.pos, format!("unexpected {}", other.describe()))),
        }
    }
}
