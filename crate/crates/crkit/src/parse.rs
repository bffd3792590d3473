//! Text form for polynomials. `parse_poly` accepts what `Poly::render`
//! prints, plus arbitrary whitespace and parenthesized subexpressions.
//!
//! Coefficients: `3`, `3/2`, `i`, `2i`, `1/2i`, `(3/2+1/2i)`. Variables are
//! whatever the context declares (standard contexts use z1..zn, zb1..zbn).

use crate::error::CrError;
use crate::gauss::GaussRat;
use crate::poly::Poly;
use crate::vars::VarContext;
use num::{BigInt, BigRational, Zero};
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize)>, // token, 1-based column
    pos: usize,
}

fn lex(s: &str) -> Result<Lexer, CrError> {
    let bytes = s.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, col));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, col));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = BigInt::from_str(&s[start..i]).expect("digits");
                toks.push((Tok::Num(n), col));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(s[start..i].to_string()), col));
            }
            _ => return Err(CrError::parse(col, format!("unexpected character '{}'", c))),
        }
    }
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or_else(|| {
            self.toks.last().map(|t| t.1 + 1).unwrap_or(1)
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

struct Parser<'a> {
    lx: Lexer,
    ctx: &'a Arc<VarContext>,
}

impl<'a> Parser<'a> {
    fn expr(&mut self) -> Result<Poly, CrError> {
        let mut neg = false;
        if self.lx.eat(&Tok::Minus) {
            neg = true;
        } else {
            self.lx.eat(&Tok::Plus);
        }
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.lx.eat(&Tok::Plus) {
                let t = self.term()?;
                acc = acc.add(&t);
            } else if self.lx.eat(&Tok::Minus) {
                let t = self.term()?;
                acc = acc.sub(&t);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, CrError> {
        let mut acc = self.factor()?;
        while self.lx.eat(&Tok::Star) {
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, CrError> {
        let base = self.primary()?;
        if self.lx.eat(&Tok::Caret) {
            let col = self.lx.col();
            match self.lx.next() {
                Some(Tok::Num(n)) => {
                    let k = u32::try_from(&n)
                        .map_err(|_| CrError::parse(col, "exponent too large"))?;
                    Ok(base.pow(k))
                }
                _ => Err(CrError::parse(col, "expected integer exponent after '^'")),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Poly, CrError> {
        let col = self.lx.col();
        match self.lx.next() {
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if !self.lx.eat(&Tok::RParen) {
                    return Err(CrError::parse(self.lx.col(), "expected ')'"));
                }
                Ok(inner)
            }
            Some(Tok::Num(n)) => {
                let mut rat = BigRational::from_integer(n);
                if self.lx.eat(&Tok::Slash) {
                    let dcol = self.lx.col();
                    match self.lx.next() {
                        Some(Tok::Num(d)) => {
                            if d.is_zero() {
                                return Err(CrError::parse(dcol, "zero denominator"));
                            }
                            rat /= BigRational::from_integer(d);
                        }
                        _ => {
                            return Err(CrError::parse(
                                dcol,
                                "expected integer denominator after '/'",
                            ))
                        }
                    }
                }
                // Postfix imaginary marker: 2i, 1/2i.
                if let Some(Tok::Ident(name)) = self.lx.peek() {
                    if name == "i" && self.ctx.find("i").is_none() {
                        self.lx.next();
                        return Ok(Poly::constant(
                            self.ctx,
                            GaussRat::new(BigRational::zero(), rat),
                        ));
                    }
                    return Err(CrError::parse(
                        self.lx.col(),
                        "expected '*' between coefficient and variable",
                    ));
                }
                Ok(Poly::constant(self.ctx, GaussRat::new(rat, BigRational::zero())))
            }
            Some(Tok::Ident(name)) => {
                if name == "i" && self.ctx.find("i").is_none() {
                    return Ok(Poly::constant(self.ctx, GaussRat::i()));
                }
                match self.ctx.find(&name) {
                    Some(idx) => Ok(Poly::var(self.ctx, idx)),
                    None => Err(CrError::parse(col, format!("unknown variable {}", name))),
                }
            }
            _ => Err(CrError::parse(col, "expected a coefficient, variable, or '('")),
        }
    }
}

/// Parses a polynomial in the given context.
pub fn parse_poly(s: &str, ctx: &Arc<VarContext>) -> Result<Poly, CrError> {
    let lx = lex(s)?;
    let mut p = Parser { lx, ctx };
    let poly = p.expr()?;
    if p.lx.peek().is_some() {
        return Err(CrError::parse(p.lx.col(), "trailing input after polynomial"));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_syntax() {
        let ctx = VarContext::paired(2);
        let p = parse_poly("(3/2+1/2i)*z1^2*zb1", &ctx).unwrap();
        assert_eq!(p.render(), "(3/2+1/2i)*z1^2*zb1");
        let q = parse_poly(" ( 3/2 + 1/2 i ) * z1 ^ 2 * zb1 ", &ctx).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_unknown_variable_with_column() {
        let ctx = VarContext::paired(1);
        let err = parse_poly("z1 + w3", &ctx).unwrap_err();
        match err {
            CrError::Parse { col, .. } => assert_eq!(col, 6),
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn rejects_zero_denominator() {
        let ctx = VarContext::paired(1);
        assert!(parse_poly("1/0*z1", &ctx).is_err());
    }

    #[test]
    fn unary_minus_and_nesting() {
        let ctx = VarContext::paired(1);
        let p = parse_poly("-(z1 - zb1)^2", &ctx).unwrap();
        let q = parse_poly("-z1^2 + 2*z1*zb1 - zb1^2", &ctx).unwrap();
        assert_eq!(p, q);
    }
}
