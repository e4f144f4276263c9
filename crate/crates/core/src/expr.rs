//! A small expression language for coordinate and meridian functions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'u' | 'v' | '(' expr ')' | func '(' expr ')'
//! func   := sin | cos | sinh | cosh | exp | log | sqrt
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right, so
//! `-u^2` is `-(u^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::jet::{Jet2, Scalar, Scalar2Jet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    V,
}

/// Expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionExpr {
    Num(f64),
    Var(Var),
    Neg(Box<FunctionExpr>),
    Bin(BinOp, Box<FunctionExpr>, Box<FunctionExpr>),
    Call(Func, Box<FunctionExpr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("variable `v` at offset {offset} is not allowed in a meridian function of u")]
    VInMeridian { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::VInMeridian { offset } => *offset,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("division by zero at (u, v) = ({u}, {v})")]
    DivisionByZero { u: f64, v: f64 },
    #[error("{func} of non-positive argument {arg} at (u, v) = ({u}, {v})")]
    NonPositive {
        func: &'static str,
        arg: f64,
        u: f64,
        v: f64,
    },
    #[error("zero raised to a negative power at (u, v) = ({u}, {v})")]
    ZeroToNegative { u: f64, v: f64 },
    #[error("non-finite value at (u, v) = ({u}, {v})")]
    NonFinite { u: f64, v: f64 },
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn bytes(&self) -> &'a [u8] {
        self.src.as_bytes()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes().get(self.pos).copied()
    }

    fn syntax<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let op = if c == b'+' { BinOp::Add } else { BinOp::Sub };
            let rhs = self.term()?;
            lhs = FunctionExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let op = if c == b'*' { BinOp::Mul } else { BinOp::Div };
            let rhs = self.unary()?;
            lhs = FunctionExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<FunctionExpr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(FunctionExpr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<FunctionExpr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(FunctionExpr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FunctionExpr, ParseError> {
        let start = match self.peek() {
            None => return self.syntax(self.pos, "unexpected end of input"),
            Some(_) => self.pos,
        };
        let c = self.bytes()[start];
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect_close(start)?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < self.src.len()
                && (self.bytes()[end].is_ascii_alphanumeric() || self.bytes()[end] == b'_')
            {
                end += 1;
            }
            let name = &self.src[start..end];
            self.pos = end;
            return match name {
                "u" => Ok(FunctionExpr::Var(Var::U)),
                "v" => Ok(FunctionExpr::Var(Var::V)),
                _ => match Func::from_name(name) {
                    Some(f) => {
                        if self.peek() != Some(b'(') {
                            return self.syntax(self.pos, format!("expected `(` after `{name}`"));
                        }
                        let open = self.pos;
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect_close(open)?;
                        Ok(FunctionExpr::Call(f, Box::new(arg)))
                    }
                    None => Err(ParseError::UnknownIdentifier {
                        offset: start,
                        name: name.to_string(),
                    }),
                },
            };
        }
        self.syntax(start, format!("unexpected character `{}`", c as char))
    }

    fn expect_close(&mut self, open: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some(b')') => {
                self.pos += 1;
                Ok(())
            }
            None => self.syntax(
                self.pos,
                format!("unbalanced parenthesis opened at offset {open}"),
            ),
            Some(c) => self.syntax(self.pos, format!("expected `)`, found `{}`", c as char)),
        }
    }

    fn number(&mut self) -> Result<FunctionExpr, ParseError> {
        let start = self.pos;
        let b = self.bytes();
        let mut end = start;
        while end < b.len() && (b[end].is_ascii_digit() || b[end] == b'.') {
            end += 1;
        }
        if end < b.len() && (b[end] == b'e' || b[end] == b'E') {
            let mut k = end + 1;
            if k < b.len() && (b[k] == b'+' || b[k] == b'-') {
                k += 1;
            }
            if k < b.len() && b[k].is_ascii_digit() {
                while k < b.len() && b[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        match text.parse::<f64>() {
            Ok(x) => {
                self.pos = end;
                Ok(FunctionExpr::Num(x))
            }
            Err(_) => self.syntax(start, format!("malformed number `{text}`")),
        }
    }
}

/// Parse an expression in `u` and `v`.
pub fn parse(text: &str) -> Result<FunctionExpr, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        let msg = if c == b')' {
            "unbalanced closing parenthesis".to_string()
        } else {
            format!("unexpected trailing input `{}`", c as char)
        };
        return p.syntax(p.pos, msg);
    }
    Ok(e)
}

/// Parse a meridian function, which may depend on `u` only.
pub fn parse_meridian(text: &str) -> Result<FunctionExpr, ParseError> {
    let e = parse(text)?;
    if e.uses_v() {
        // Report the byte offset of the first standalone `v` token.
        let offset = find_ident(text, "v").unwrap_or(0);
        return Err(ParseError::VInMeridian { offset });
    }
    Ok(e)
}

fn find_ident(text: &str, ident: &str) -> Option<usize> {
    let b = text.as_bytes();
    let is_word = |c: u8| c.is_ascii_alphanumeric() || c == b'_';
    text.match_indices(ident).map(|(i, _)| i).find(|&i| {
        let before = i == 0 || !is_word(b[i - 1]);
        let after = i + ident.len() >= b.len() || !is_word(b[i + ident.len()]);
        before && after
    })
}

impl FromStr for FunctionExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl FunctionExpr {
    pub fn num(x: f64) -> Self {
        FunctionExpr::Num(x)
    }
    pub fn u() -> Self {
        FunctionExpr::Var(Var::U)
    }
    pub fn v() -> Self {
        FunctionExpr::Var(Var::V)
    }
    pub fn call(f: Func, arg: FunctionExpr) -> Self {
        FunctionExpr::Call(f, Box::new(arg))
    }
    pub fn bin(op: BinOp, a: FunctionExpr, b: FunctionExpr) -> Self {
        FunctionExpr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn uses_v(&self) -> bool {
        match self {
            FunctionExpr::Num(_) => false,
            FunctionExpr::Var(v) => *v == Var::V,
            FunctionExpr::Neg(a) | FunctionExpr::Call(_, a) => a.uses_v(),
            FunctionExpr::Bin(_, a, b) => a.uses_v() || b.uses_v(),
        }
    }

    /// Substitute `u` and `v` by the given expressions.
    pub fn substitute(&self, u: &FunctionExpr, v: &FunctionExpr) -> FunctionExpr {
        match self {
            FunctionExpr::Num(x) => FunctionExpr::Num(*x),
            FunctionExpr::Var(Var::U) => u.clone(),
            FunctionExpr::Var(Var::V) => v.clone(),
            FunctionExpr::Neg(a) => FunctionExpr::Neg(Box::new(a.substitute(u, v))),
            FunctionExpr::Call(f, a) => FunctionExpr::Call(*f, Box::new(a.substitute(u, v))),
            FunctionExpr::Bin(op, a, b) => {
                FunctionExpr::Bin(*op, Box::new(a.substitute(u, v)), Box::new(b.substitute(u, v)))
            }
        }
    }

    /// Evaluate with arbitrary scalar arithmetic, given the values of `u` and `v`.
    ///
    /// `at` is only used to label domain errors.
    pub fn eval_with<T: Scalar>(&self, u: T, v: T, at: (f64, f64)) -> Result<T, DomainError> {
        let (pu, pv) = at;
        let out = match self {
            FunctionExpr::Num(x) => T::cst(*x),
            FunctionExpr::Var(Var::U) => u,
            FunctionExpr::Var(Var::V) => v,
            FunctionExpr::Neg(a) => -a.eval_with(u, v, at)?,
            FunctionExpr::Call(f, a) => {
                let x = a.eval_with(u, v, at)?;
                let positive = |name: &'static str| {
                    if x.re() > 0.0 {
                        Ok(())
                    } else {
                        Err(DomainError::NonPositive {
                            func: name,
                            arg: x.re(),
                            u: pu,
                            v: pv,
                        })
                    }
                };
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        positive("log")?;
                        x.ln()
                    }
                    Func::Sqrt => {
                        positive("sqrt")?;
                        x.sqrt()
                    }
                }
            }
            FunctionExpr::Bin(op, a, b) => {
                let x = a.eval_with(u, v, at)?;
                let y = b.eval_with(u, v, at)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.re() == 0.0 {
                            return Err(DomainError::DivisionByZero { u: pu, v: pv });
                        }
                        x / y
                    }
                    BinOp::Pow => pow(x, y, at)?,
                }
            }
        };
        if out.re().is_finite() {
            Ok(out)
        } else {
            Err(DomainError::NonFinite { u: pu, v: pv })
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<f64, DomainError> {
        self.eval_with(u, v, (u, v))
    }

    /// Value and exact first and second partials at `(u, v)`.
    pub fn lift(&self, u: f64, v: f64) -> Result<Scalar2Jet, DomainError> {
        self.eval_with(Jet2::u(u), Jet2::v(v), (u, v))
    }
}

fn pow<T: Scalar>(x: T, y: T, at: (f64, f64)) -> Result<T, DomainError> {
    let (u, v) = at;
    let (b, p) = (x.re(), y.re());
    if y.is_const() {
        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
            if b == 0.0 && p < 0.0 {
                return Err(DomainError::ZeroToNegative { u, v });
            }
            return Ok(x.powi(p as i32));
        }
        if b <= 0.0 {
            if b == 0.0 && p < 0.0 {
                return Err(DomainError::ZeroToNegative { u, v });
            }
            return Err(DomainError::NonPositive {
                func: "non-integer power",
                arg: b,
                u,
                v,
            });
        }
        return Ok(x.powf(p));
    }
    if b <= 0.0 {
        return Err(DomainError::NonPositive {
            func: "variable-exponent power",
            arg: b,
            u,
            v,
        });
    }
    Ok((y * x.ln()).exp())
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f, 0)
    }
}

// `ctx` is the binding strength the surrounding position requires.
fn write_expr(e: &FunctionExpr, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
    match e {
        FunctionExpr::Num(x) => {
            if *x < 0.0 || (*x == 0.0 && x.is_sign_negative()) {
                // Negative literals only arise from construction, not parsing.
                write!(f, "({})", x)
            } else {
                write!(f, "{}", x)
            }
        }
        FunctionExpr::Var(Var::U) => f.write_str("u"),
        FunctionExpr::Var(Var::V) => f.write_str("v"),
        FunctionExpr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, f, 0)?;
            f.write_str(")")
        }
        FunctionExpr::Neg(a) => {
            let paren = ctx > 3;
            if paren {
                f.write_str("(")?;
            }
            f.write_str("-")?;
            write_expr(a, f, 3)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        FunctionExpr::Bin(op, a, b) => {
            let p = op.precedence();
            let paren = p < ctx;
            if paren {
                f.write_str("(")?;
            }
            let (lctx, rctx) = match op {
                BinOp::Pow => (p + 1, 3),
                _ => (p, p + 1),
            };
            write_expr(a, f, lctx)?;
            write!(f, " {} ", op.symbol())?;
            write_expr(b, f, rctx)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl Serialize for FunctionExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FunctionExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_function_call() {
        assert_eq!(
            parse("cos(u)").unwrap(),
            FunctionExpr::call(Func::Cos, FunctionExpr::u())
        );
    }

    #[test]
    fn precedence_of_power_product_sum() {
        let e = parse("u^2 + 3*sinh(u)").unwrap();
        let expected = FunctionExpr::bin(
            BinOp::Add,
            FunctionExpr::bin(BinOp::Pow, FunctionExpr::u(), FunctionExpr::num(2.0)),
            FunctionExpr::bin(
                BinOp::Mul,
                FunctionExpr::num(3.0),
                FunctionExpr::call(Func::Sinh, FunctionExpr::u()),
            ),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn unbalanced_parenthesis_offset() {
        let err = parse("cos(u").unwrap_err();
        assert_eq!(err.offset(), 5);
        assert!(err.to_string().contains("unbalanced parenthesis"));
    }

    #[test]
    fn power_is_right_associative_and_above_negation() {
        assert_eq!(parse("2^3^2").unwrap().eval(0.0, 0.0).unwrap(), 512.0);
        assert_eq!(parse("-u^2").unwrap().eval(3.0, 0.0).unwrap(), -9.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(parse("8 - 2 - 1").unwrap().eval(0.0, 0.0).unwrap(), 5.0);
        assert_eq!(parse("8 / 2 / 2").unwrap().eval(0.0, 0.0).unwrap(), 2.0);
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1.5e-3").unwrap().eval(0.0, 0.0).unwrap(), 1.5e-3);
        assert_eq!(parse("2E2*u").unwrap().eval(1.0, 0.0).unwrap(), 200.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse("tan(u)"),
            Err(ParseError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(parse("u +"), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("u)"), Err(ParseError::Syntax { offset: 1, .. })));
        assert!(matches!(
            parse_meridian("cos(u) + v"),
            Err(ParseError::VInMeridian { offset: 9 })
        ));
        assert!(parse_meridian("cosh(u)").is_ok());
    }

    #[test]
    fn domain_errors() {
        let at = |s: &str, u: f64| parse(s).unwrap().lift(u, 0.0);
        assert!(matches!(at("1/u", 0.0), Err(DomainError::DivisionByZero { .. })));
        assert!(matches!(at("log(u)", -1.0), Err(DomainError::NonPositive { .. })));
        assert!(matches!(at("sqrt(u)", 0.0), Err(DomainError::NonPositive { .. })));
        assert!(matches!(at("u^(-2)", 0.0), Err(DomainError::ZeroToNegative { .. })));
        assert!(matches!(at("u^0.5", -1.0), Err(DomainError::NonPositive { .. })));
        assert!(at("u^2", -1.0).is_ok());
        let err = at("log(u)", -1.0).unwrap_err();
        assert!(err.to_string().contains("(-1, 0)"));
    }

    #[test]
    fn integer_power_is_exact() {
        let j = parse("u^3").unwrap().lift(1.1, 0.0).unwrap();
        let m = Jet2::u(1.1) * Jet2::u(1.1) * Jet2::u(1.1);
        assert_eq!(j, m);
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "-u^2",
            "(-u)^2",
            "u - (v - 1)",
            "2^3^2",
            "(2^3)^2",
            "sin(u * v) / (1 + exp(-u))",
            "-(u + v) * 3",
            "u^-v",
        ] {
            let e = parse(s).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{s} -> {printed}");
        }
    }
}
