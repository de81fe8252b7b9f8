//! Recursive-descent parser for univariate polynomial expressions.
//!
//! ```text
//! poly   := "coeffs:" rat ("," rat)* | expr
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/")? unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" integer)?
//! atom   := number | variable | "(" expr ")"
//! ```
//!
//! Juxtaposition is multiplication, so `2x^2` and `(x+1)(x-1)` parse. Division
//! is only allowed by nonzero constants.

use num_bigint::BigInt;
use num_traits::One;

use super::poly::Poly;
use super::PolyError;
use crate::exactlin::Rat;

const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Var(char),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn syntax(offset: usize, message: impl Into<String>) -> PolyError {
    PolyError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str, base: usize) -> Result<Vec<(usize, Tok)>, PolyError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(at, ch)) = chars.peek() {
        let offset = base + at;
        if ch.is_whitespace() {
            chars.next();
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let mut end = at;
            let mut seen_dot = false;
            while let Some(&(k, c)) = chars.peek() {
                if c.is_ascii_digit() {
                    end = k + 1;
                } else if c == '.' && !seen_dot {
                    seen_dot = true;
                    end = k + 1;
                } else {
                    break;
                }
                chars.next();
            }
            let lit = &text[at..end];
            out.push((offset, Tok::Num(decimal(lit).ok_or_else(|| syntax(offset, format!("bad number {lit:?}")))?)));
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' | '\u{b7}' | '\u{d7}' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_alphabetic() => Tok::Var(c),
            c => return Err(syntax(offset, format!("unexpected character {c:?}"))),
        };
        out.push((offset, tok));
        chars.next();
    }
    Ok(out)
}

fn decimal(lit: &str) -> Option<Rat> {
    let (int, frac) = lit.split_once('.').unwrap_or((lit, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rat::new(numer, denom))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    var: Option<char>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let at = self.offset();
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(syntax(at, "division only by a nonzero constant"));
                    }
                    acc = acc.scale(&(Rat::one() / d.leading_coeff()));
                }
                Some(Tok::Num(_) | Tok::Var(_) | Tok::LParen) => {
                    acc = &acc * &self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, PolyError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, PolyError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) if n.is_integer() => {
                let e = n
                    .to_integer()
                    .try_into()
                    .ok()
                    .filter(|&e: &u32| e <= MAX_EXPONENT)
                    .ok_or_else(|| syntax(at, "exponent out of range"))?;
                Ok(base.pow(e))
            }
            _ => Err(syntax(at, "expected a non-negative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Poly::constant(n)),
            Some(Tok::Var(c)) => match self.var {
                Some(v) if v != c => Err(syntax(at, format!("variable {c:?} conflicts with {v:?}"))),
                _ => {
                    self.var = Some(c);
                    Ok(Poly::x())
                }
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let close = self.offset();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(syntax(close, "expected ')'")),
                }
            }
            Some(t) => Err(syntax(at, format!("unexpected {}", describe(&t)))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(_) => "number",
        Tok::Var(_) => "variable",
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
    }
}

fn parse_coeff_list(text: &str, base: usize) -> Result<Poly, PolyError> {
    let mut coeffs = Vec::new();
    let mut at = base;
    for item in text.split(',') {
        let lead = item.len() - item.trim_start().len();
        let token = item.trim().replace('\u{2212}', "-");
        if token.is_empty() {
            return Err(syntax(at + lead, "empty coefficient"));
        }
        let c = crate::exactlin::text::parse_rat(&token)
            .or_else(|_| {
                let (neg, body) = token.strip_prefix('-').map_or((false, &*token), |b| (true, b));
                decimal(body).map(|d| if neg { -d } else { d }).ok_or(())
            })
            .map_err(|_| syntax(at + lead, format!("bad coefficient {:?}", item.trim())))?;
        coeffs.push(c);
        at += item.len() + 1;
    }
    Ok(Poly::from_coeffs(coeffs))
}

/// Parses an expression or a `coeffs:` list into a polynomial, possibly zero
/// or constant. The variable letter used, if any, is returned alongside.
pub fn parse_any(text: &str) -> Result<(Poly, Option<char>), PolyError> {
    let trimmed = text.trim_start();
    let skipped = text.len() - trimmed.len();
    if let Some(rest) = trimmed.strip_prefix("coeffs:") {
        return Ok((parse_coeff_list(rest, skipped + "coeffs:".len())?, None));
    }
    let toks = lex(text, 0)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        var: None,
    };
    if p.peek().is_none() {
        return Err(syntax(text.len(), "empty expression"));
    }
    let poly = p.expr()?;
    if p.pos < p.toks.len() {
        let at = p.offset();
        let what = describe(&p.toks[p.pos].1);
        return Err(syntax(at, format!("unexpected {what}")));
    }
    Ok((poly, p.var))
}
