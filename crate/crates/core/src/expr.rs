//! A small expression language shared by every textual surface of the crate.
//!
//! Expressions use `+ - * / ^ ( )`, integer literals and identifiers. The same
//! syntax tree is evaluated into scalars, polynomials and algebra elements
//! through the [`Evaluator`] trait, so products keep their written order (the
//! algebras are non-commutative).

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token {found} at offset {pos}")]
    UnexpectedToken { found: String, pos: usize },
    #[error("exponent out of range at offset {pos}")]
    BadExponent { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

/// Target of expression evaluation.
pub trait Evaluator {
    type Value;
    type Error: From<ParseError>;

    fn integer(&self, n: &BigInt) -> Result<Self::Value, Self::Error>;
    fn variable(&self, name: &str) -> Result<Self::Value, Self::Error>;
    fn add(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, Self::Error>;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, Self::Error>;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, Self::Error>;
    fn neg(&self, a: Self::Value) -> Result<Self::Value, Self::Error>;
    fn div(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, Self::Error>;
    fn pow(&self, a: Self::Value, exp: i64) -> Result<Self::Value, Self::Error>;
}

impl Expr {
    pub fn eval<E: Evaluator>(&self, ev: &E) -> Result<E::Value, E::Error> {
        match self {
            Expr::Int(n) => ev.integer(n),
            Expr::Var(name) => ev.variable(name),
            Expr::Neg(a) => {
                let a = a.eval(ev)?;
                ev.neg(a)
            }
            Expr::Add(a, b) => {
                let (a, b) = (a.eval(ev)?, b.eval(ev)?);
                ev.add(a, b)
            }
            Expr::Sub(a, b) => {
                let (a, b) = (a.eval(ev)?, b.eval(ev)?);
                ev.sub(a, b)
            }
            Expr::Mul(a, b) => {
                let (a, b) = (a.eval(ev)?, b.eval(ev)?);
                ev.mul(a, b)
            }
            Expr::Div(a, b) => {
                let (a, b) = (a.eval(ev)?, b.eval(ev)?);
                ev.div(a, b)
            }
            Expr::Pow(a, e) => {
                let a = a.eval(ev)?;
                ev.pow(a, *e)
            }
        }
    }

    /// Identifiers occurring in the expression, in first-occurrence order.
    pub fn identifiers(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_identifiers(&mut out);
        out
    }

    fn collect_identifiers(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_identifiers(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_identifiers(out);
                b.collect_identifiers(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, e) => write!(f, "({a})^({e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Sym(c) => write!(f, "{c:?}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            out.push((Tok::Int(digits.parse().expect("ascii digits")), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let ident: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            out.push((Tok::Ident(ident), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar { ch: c, pos });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(usize::MAX)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.at) {
            Some((t, p)) => ParseError::UnexpectedToken { found: t.to_string(), pos: *p },
            None => ParseError::UnexpectedEnd,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            Ok(Expr::Pow(Box::new(base), e))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = self.eat('(');
        let negative = self.eat('-');
        let pos = self.pos();
        let value = match self.peek() {
            Some(Tok::Int(n)) => {
                let n = i64::try_from(n.clone()).map_err(|_| ParseError::BadExponent { pos })?;
                self.at += 1;
                n
            }
            _ => return Err(self.unexpected()),
        };
        if paren {
            self.expect(')')?;
        }
        Ok(if negative { -value } else { value })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(s)) => {
                self.at += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses an expression such as `(z - eps*u*v)^2` or `v^-2*z - eps*xi`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, at: 0 };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.unexpected());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse("-x^2 + 3*y").unwrap();
        let expected = Expr::Add(
            Box::new(Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var("x".into())), 2)))),
            Box::new(Expr::Mul(Box::new(Expr::Int(3.into())), Box::new(Expr::Var("y".into())))),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn negative_exponents() {
        assert_eq!(parse("v^-2").unwrap(), Expr::Pow(Box::new(Expr::Var("v".into())), -2));
        assert_eq!(parse("v^(-1)").unwrap(), Expr::Pow(Box::new(Expr::Var("v".into())), -1));
    }

    #[test]
    fn unicode_identifiers() {
        assert_eq!(parse("ξ").unwrap(), Expr::Var("ξ".into()));
        assert_eq!(parse("z1*y_2").unwrap().identifiers(), vec!["z1", "y_2"]);
    }

    #[test]
    fn errors() {
        assert_eq!(parse("1 +"), Err(ParseError::UnexpectedEnd));
        assert!(matches!(parse("(x"), Err(ParseError::UnexpectedEnd)));
        assert!(matches!(parse("x $ y"), Err(ParseError::UnexpectedChar { ch: '$', .. })));
        assert!(matches!(parse("x y"), Err(ParseError::UnexpectedToken { .. })));
        assert!(matches!(parse("x^y"), Err(ParseError::UnexpectedToken { .. })));
    }
}
