//! Recursive-descent parser for the net DSL.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' NUMBER | '-' factor | atom | call | '(' expr ')'
//! atom   := eps | n | x | t | m | pi | NUMBER
//! call   := fn '(' expr ')' | min/max '(' expr ',' expr ')'
//!         | pow '(' expr ',' rational ')' | powg/compose '(' expr ',' expr ')'
//!         | hybrid '(' expr ',' expr ',' '[' rational, ... ']' ')'
//!         | primitive '(' expr ',' expr ',' rational ')'
//!         | convolve '(' expr ',' expr ',' expr ',' expr ',' rational ')'
//! ```
//!
//! `NUMBER` is a decimal (`0.5`, `1e-3`) or a fused fraction `p/q` with no
//! whitespace around the slash; `1 / 2` is a division.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use super::expr::{BinaryOp, ConvolveNode, Expr, HybridNet, PrimitiveNode, UnaryOp, Var};
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Admit `sin` and `cos`.
    pub extended: bool,
}

impl ParseOptions {
    pub fn extended() -> Self {
        ParseOptions { extended: true }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, opts: ParseOptions) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, opts, end: text.len() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses a standalone rational literal such as `-3/2` or `0.25`.
pub fn parse_rational(text: &str) -> Result<Q, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, opts: ParseOptions::default(), end: text.len() };
    let q = p.rational()?;
    if p.pos < p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let (mut q, next) = lex_decimal(text, i)?;
            i = next;
            // fused fraction p/q
            if bytes.get(i) == Some(&b'/') && bytes.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                let (den, next) = lex_decimal(text, i + 1)?;
                if den.is_zero() {
                    return Err(ParseError::Syntax { pos: i + 1, msg: "zero denominator".to_string() });
                }
                q /= den;
                i = next;
            }
            out.push((Tok::Num(q), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        match c {
            b'+' | b'-' | b'*' | b'/' | b'(' | b')' | b',' | b'[' | b']' => {
                out.push((Tok::Sym(c as char), start));
                i += 1;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { pos: i, msg: alloc::format!("unexpected character `{}`", ch) });
            }
        }
    }
    Ok(out)
}

fn lex_decimal(text: &str, start: usize) -> Result<(Q, usize), ParseError> {
    let bytes = text.as_bytes();
    let mut i = start;
    let mut digits = String::new();
    let mut frac_len: i64 = 0;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        digits.push(bytes[i] as char);
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            digits.push(bytes[i] as char);
            frac_len += 1;
            i += 1;
        }
    }
    let mut exp10: i64 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let neg = match bytes.get(j) {
            Some(b'-') => {
                j += 1;
                true
            }
            Some(b'+') => {
                j += 1;
                false
            }
            _ => false,
        };
        if bytes.get(j).is_some_and(|d| d.is_ascii_digit()) {
            let s = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let v: i64 = text[s..j]
                .parse()
                .map_err(|_| ParseError::Syntax { pos: s, msg: "exponent out of range".to_string() })?;
            if v > 4000 {
                return Err(ParseError::Syntax { pos: s, msg: "exponent out of range".to_string() });
            }
            exp10 = if neg { -v } else { v };
            i = j;
        }
    }
    if digits.is_empty() {
        return Err(ParseError::Syntax { pos: start, msg: "malformed number".to_string() });
    }
    let int = BigInt::parse_bytes(digits.as_bytes(), 10)
        .ok_or(ParseError::Syntax { pos: start, msg: "malformed number".to_string() })?;
    let e = exp10 - frac_len;
    let ten = BigInt::from(10);
    let q = if e >= 0 {
        Q::from_integer(int * num_traits::pow(ten, e as usize))
    } else {
        Q::new(int, num_traits::pow(ten, (-e) as usize))
    };
    Ok((q, i))
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    opts: ParseOptions,
    end: usize,
}

impl Parser {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn error(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.here(), msg: msg.to_string() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&alloc::format!("expected `{}`", c)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = Expr::binary(BinaryOp::Add, acc, self.term()?);
            } else if self.eat('-') {
                acc = Expr::binary(BinaryOp::Sub, acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = Expr::binary(BinaryOp::Mul, acc, self.factor()?);
            } else if self.eat('/') {
                acc = Expr::binary(BinaryOp::Div, acc, self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn rational(&mut self) -> Result<Q, ParseError> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        match self.peek() {
            Some(Tok::Num(q)) => {
                let q = q.clone();
                self.pos += 1;
                Ok(if neg { -q } else { q })
            }
            _ => Err(self.error("expected a rational literal")),
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.peek().cloned() {
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                if let Some(Tok::Num(q)) = self.peek() {
                    let q = q.clone();
                    self.pos += 1;
                    return Ok(Expr::Const(-q));
                }
                Ok(self.factor()?.neg())
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Expr::Const(q))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.ident(&name, pos)
            }
            Some(Tok::Sym(c)) => Err(ParseError::Syntax { pos, msg: alloc::format!("unexpected `{}`", c) }),
            None => Err(ParseError::Syntax { pos, msg: "unexpected end of input".to_string() }),
        }
    }

    fn ident(&mut self, name: &str, pos: usize) -> Result<Expr, ParseError> {
        let simple = match name {
            "eps" => Some(Expr::Var(Var::Eps)),
            "n" => Some(Expr::Var(Var::N)),
            "x" => Some(Expr::Var(Var::X)),
            "t" => Some(Expr::Var(Var::T)),
            "m" => Some(Expr::Param),
            "pi" => Some(Expr::Pi),
            _ => None,
        };
        if let Some(e) = simple {
            return Ok(e);
        }
        let unary = match name {
            "exp" => Some(UnaryOp::Exp),
            "log" => Some(UnaryOp::Log),
            "abs" => Some(UnaryOp::Abs),
            "floor" => Some(UnaryOp::Floor),
            "sin" | "cos" if self.opts.extended => Some(if name == "sin" { UnaryOp::Sin } else { UnaryOp::Cos }),
            _ => None,
        };
        if let Some(op) = unary {
            self.expect('(')?;
            let a = self.expr()?;
            self.expect(')')?;
            return Ok(Expr::unary(op, a));
        }
        match name {
            "min" | "max" | "powg" | "compose" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                Ok(match name {
                    "min" => Expr::binary(BinaryOp::Min, a, b),
                    "max" => Expr::binary(BinaryOp::Max, a, b),
                    "powg" => a.pow_general(b),
                    _ => a.compose(b),
                })
            }
            "pow" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let q = self.rational()?;
                self.expect(')')?;
                Ok(Expr::Pow(Box::new(a), q))
            }
            "hybrid" => {
                self.expect('(')?;
                let low = self.expr()?;
                self.expect(',')?;
                let high = self.expr()?;
                self.expect(',')?;
                self.expect('[')?;
                let mut switches = Vec::new();
                if !self.eat(']') {
                    loop {
                        switches.push(self.rational()?);
                        if self.eat(']') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                self.expect(')')?;
                Ok(Expr::Hybrid(Arc::new(HybridNet { low, high, switches })))
            }
            "primitive" => {
                self.expect('(')?;
                let rho = self.expr()?;
                self.expect(',')?;
                let upper = self.expr()?;
                self.expect(',')?;
                let radius = self.rational()?;
                self.expect(')')?;
                Ok(Expr::Primitive(Arc::new(PrimitiveNode { rho, upper, radius })))
            }
            "convolve" => {
                self.expect('(')?;
                let f = self.expr()?;
                self.expect(',')?;
                let rho = self.expr()?;
                self.expect(',')?;
                let scale = self.expr()?;
                self.expect(',')?;
                let at = self.expr()?;
                self.expect(',')?;
                let radius = self.rational()?;
                self.expect(')')?;
                Ok(Expr::Convolve(Arc::new(ConvolveNode { f, rho, scale, at, radius })))
            }
            _ => Err(ParseError::UnknownIdentifier { pos, name: name.to_string() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::expr::q;
    use num_traits::One;

    #[test]
    fn grammar_examples() {
        assert_eq!(parse("pow(eps,-3)").unwrap(), Expr::eps().pow(q(-3)));
        assert_eq!(parse("exp(2/eps)").unwrap(), Expr::int(2).div(Expr::eps()).exp());
        let err = parse("eps + pow(eps,2)*sin(1/eps)").unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdentifier { ref name, .. } if name == "sin"));
        let e = parse_with("eps + pow(eps,2)*sin(1/eps)", ParseOptions::extended()).unwrap();
        assert!(e.mentions(Var::Eps));
    }

    #[test]
    fn fused_fraction_versus_division() {
        assert_eq!(parse("1/2").unwrap(), Expr::Const(Q::new(1.into(), 2.into())));
        assert_eq!(parse("1 / 2").unwrap(), Expr::int(1).div(Expr::int(2)));
        assert_eq!(parse("-0.25").unwrap(), Expr::Const(Q::new((-1).into(), 4.into())));
        assert_eq!(parse("-(3)").unwrap(), Expr::int(3).neg());
        assert_eq!(parse("1e-3").unwrap(), Expr::Const(Q::new(1.into(), 1000.into())));
        assert!(Q::one() == parse_rational("4/4").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        match parse("eps + * 2") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{:?}", other),
        }
        match parse("foo(eps)") {
            Err(ParseError::UnknownIdentifier { pos, name }) => {
                assert_eq!(pos, 0);
                assert_eq!(name, "foo");
            }
            other => panic!("{:?}", other),
        }
        assert!(parse("pow(eps, m)").is_err());
        assert!(parse("(eps").is_err());
        assert!(parse("eps)").is_err());
    }
}
