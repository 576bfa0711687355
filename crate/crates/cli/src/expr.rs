//! Expressions over a graded context.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nat)?
//! atom   := nat ('/' nat)? | ident | 'd' '(' ident ')' | '(' expr ')'
//! ```

use std::sync::Arc;

use nqcalc_core::context::differential_name;
use nqcalc_core::poly::GradedPoly;
use nqcalc_core::{GradedContext, Rational};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{ManifestError, Pos};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Nat(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Gen(String, Pos),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

fn lex(text: &str, origin: Pos) -> Result<Vec<(Tok, Pos)>, ManifestError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = origin.shift(i);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Nat(s.parse().expect("digits")), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(ManifestError::syntax(pos, format!("unexpected character `{c}`"))),
        };
        out.push((t, pos));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ManifestError> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            Some((_, p)) => Err(ManifestError::syntax(p, format!("expected {what}"))),
            None => Err(ManifestError::syntax(self.end, format!("expected {what}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ManifestError> {
        let mut lhs = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Expr::Neg(Box::new(self.term()?))
            }
            Some(Tok::Plus) => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ManifestError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ManifestError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Some((Tok::Nat(n), p)) => {
                let e = n.to_u32().ok_or_else(|| ManifestError::syntax(p, "exponent too large"))?;
                Ok(Expr::Pow(Box::new(base), e))
            }
            Some((_, p)) => Err(ManifestError::syntax(p, "expected a natural exponent")),
            None => Err(ManifestError::syntax(self.end, "expected a natural exponent, found end of input")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ManifestError> {
        let pos = self.pos();
        match self.bump() {
            Some((Tok::Nat(n), _)) => {
                if self.peek() != Some(&Tok::Slash) {
                    return Ok(Expr::Num(Rational::from_integer(n)));
                }
                self.bump();
                match self.bump() {
                    Some((Tok::Nat(d), p)) => {
                        if d.is_zero() {
                            return Err(ManifestError::syntax(p, "zero denominator"));
                        }
                        Ok(Expr::Num(Rational::new(n, d)))
                    }
                    Some((_, p)) => Err(ManifestError::syntax(p, "expected a denominator")),
                    None => Err(ManifestError::syntax(self.end, "expected a denominator, found end of input")),
                }
            }
            Some((Tok::Ident(name), _)) => {
                if name == "d" && self.peek() == Some(&Tok::LParen) {
                    self.bump();
                    let inner = match self.bump() {
                        Some((Tok::Ident(x), _)) => x,
                        Some((_, p)) => return Err(ManifestError::syntax(p, "expected a coordinate inside d(...)")),
                        None => return Err(ManifestError::syntax(self.end, "unterminated d(...)")),
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Gen(differential_name(&inner), pos))
                } else {
                    Ok(Expr::Gen(name, pos))
                }
            }
            Some((Tok::LParen, _)) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some((_, p)) => Err(ManifestError::syntax(p, "expected a number, generator or `(`")),
            None => Err(ManifestError::syntax(self.end, "unexpected end of input")),
        }
    }
}

/// Parses `text`, whose first character sits at `origin`, into a syntax tree.
pub fn parse_ast(text: &str, origin: Pos) -> Result<Expr, ManifestError> {
    let toks = lex(text, origin)?;
    let end = origin.shift(text.chars().count());
    let mut p = Parser { toks, at: 0, end };
    if p.peek().is_none() {
        return Err(ManifestError::syntax(end, "empty expression"));
    }
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return Err(ManifestError::syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}

pub fn evaluate(e: &Expr, ctx: &Arc<GradedContext>) -> Result<GradedPoly, ManifestError> {
    Ok(match e {
        Expr::Num(q) => GradedPoly::constant(ctx, q.clone()),
        Expr::Gen(name, pos) => {
            GradedPoly::var(ctx, name).map_err(|_| ManifestError::UnknownGenerator { pos: *pos, name: name.clone() })?
        }
        Expr::Add(a, b) => evaluate(a, ctx)? + evaluate(b, ctx)?,
        Expr::Sub(a, b) => evaluate(a, ctx)? - evaluate(b, ctx)?,
        Expr::Mul(a, b) => evaluate(a, ctx)? * evaluate(b, ctx)?,
        Expr::Neg(a) => -evaluate(a, ctx)?,
        Expr::Pow(a, n) => evaluate(a, ctx)?.pow(*n),
    })
}

/// Parses and normalizes an expression at a given position of a manifest.
pub fn parse_at(text: &str, origin: Pos, ctx: &Arc<GradedContext>) -> Result<GradedPoly, ManifestError> {
    evaluate(&parse_ast(text, origin)?, ctx)
}

/// Parses and normalizes a standalone expression.
pub fn parse_expression(text: &str, ctx: &Arc<GradedContext>) -> Result<GradedPoly, ManifestError> {
    parse_at(text, Pos::new(1, 1), ctx)
}
