use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// A real number held symbolically so that it can be produced at any
/// precision: rationals, π, square roots and field operations on them.
///
/// Parameters that feed cancelling series (for example `a = 2π(k+1)`) have to
/// be exact to the escalated working precision, not just to the caller's
/// digits, so the series engines take `ExactReal` inputs and evaluate them on
/// demand.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactReal {
    Rational(Rational),
    Pi,
    /// An MPFR value taken as exact.
    Binary(Float),
    Sqrt(Box<ExactReal>),
    Neg(Box<ExactReal>),
    Add(Box<ExactReal>, Box<ExactReal>),
    Sub(Box<ExactReal>, Box<ExactReal>),
    Mul(Box<ExactReal>, Box<ExactReal>),
    Div(Box<ExactReal>, Box<ExactReal>),
    Pow(Box<ExactReal>, i32),
}

impl ExactReal {
    pub fn int(n: i64) -> Self {
        ExactReal::Rational(Rational::from(n))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        ExactReal::Rational(Rational::from((p, q)))
    }

    pub fn rational(r: Rational) -> Self {
        ExactReal::Rational(r)
    }

    pub fn pi() -> Self {
        ExactReal::Pi
    }

    /// Exact binary value of a finite f64.
    pub fn from_f64(x: f64) -> Self {
        match Rational::from_f64(x) {
            Some(r) => ExactReal::Rational(r),
            None => ExactReal::Binary(Float::with_val(53, x)),
        }
    }

    pub fn sqrt(self) -> Self {
        if let Some(r) = self.as_rational() {
            if r >= 0 {
                let (n, d) = r.clone().into_numer_denom();
                if n.is_perfect_square() && d.is_perfect_square() {
                    return ExactReal::Rational(Rational::from((n.sqrt(), d.sqrt())));
                }
            }
        }
        ExactReal::Sqrt(Box::new(self))
    }

    pub fn powi(self, n: i32) -> Self {
        if let Some(r) = self.as_rational() {
            if n >= 0 || r != 0 {
                return ExactReal::Rational(r.pow(n));
            }
        }
        ExactReal::Pow(Box::new(self), n)
    }

    /// The value as a rational, when the expression is rational by
    /// construction.
    pub fn as_rational(&self) -> Option<Rational> {
        use ExactReal::*;
        Some(match self {
            Rational(r) => r.clone(),
            Neg(a) => -a.as_rational()?,
            Add(a, b) => a.as_rational()? + b.as_rational()?,
            Sub(a, b) => a.as_rational()? - b.as_rational()?,
            Mul(a, b) => a.as_rational()? * b.as_rational()?,
            Div(a, b) => {
                let d = b.as_rational()?;
                if d == 0 {
                    return None;
                }
                a.as_rational()? / d
            }
            Pow(a, n) => {
                let r = a.as_rational()?;
                if *n < 0 && r == 0 {
                    return None;
                }
                r.pow(*n)
            }
            Pi | Binary(_) | Sqrt(_) => return None,
        })
    }

    pub fn as_integer(&self) -> Option<Integer> {
        let r = self.as_rational()?;
        if *r.denom() == 1 {
            Some(r.numer().clone())
        } else {
            None
        }
    }

    /// Value rounded to `prec` bits.
    pub fn eval(&self, prec: u32) -> Float {
        let mut v = self.eval_inner(prec + 32);
        v.set_prec(prec);
        v
    }

    fn eval_inner(&self, p: u32) -> Float {
        use ExactReal::*;
        match self {
            Rational(r) => Float::with_val(p, r),
            Pi => Float::with_val(p, Constant::Pi),
            Binary(f) => Float::with_val(p, f),
            Sqrt(a) => a.eval_inner(p).sqrt(),
            Neg(a) => -a.eval_inner(p),
            Add(a, b) => a.eval_inner(p) + b.eval_inner(p),
            Sub(a, b) => a.eval_inner(p) - b.eval_inner(p),
            Mul(a, b) => a.eval_inner(p) * b.eval_inner(p),
            Div(a, b) => a.eval_inner(p) / b.eval_inner(p),
            Pow(a, n) => a.eval_inner(p).pow(*n),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.eval(64).to_f64()
    }

    fn precedence(&self) -> u8 {
        use ExactReal::*;
        match self {
            Add(..) | Sub(..) => 1,
            Neg(_) => 2,
            Mul(..) | Div(..) => 3,
            Rational(r) if *r.denom() != 1 => 3,
            Rational(r) if *r < 0 => 2,
            Binary(f) if f.is_sign_negative() => 2,
            Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ExactReal::*;
        match self {
            Rational(r) => write!(f, "{r}"),
            Pi => f.write_str("pi"),
            Binary(x) => write!(f, "{}", super::format_float(x, 20)),
            Sqrt(a) => write!(f, "sqrt({a})"),
            Neg(a) => {
                f.write_str("-")?;
                a.fmt_child(f, 3)
            }
            Add(a, b) => {
                a.fmt_child(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_child(f, 2)
            }
            Sub(a, b) => {
                a.fmt_child(f, 1)?;
                f.write_str(" - ")?;
                b.fmt_child(f, 3)
            }
            Mul(a, b) => {
                a.fmt_child(f, 3)?;
                f.write_str("*")?;
                b.fmt_child(f, 4)
            }
            Div(a, b) => {
                a.fmt_child(f, 3)?;
                f.write_str("/")?;
                b.fmt_child(f, 4)
            }
            Pow(a, n) => {
                a.fmt_child(f, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
        }
    }
}

fn fold(
    a: ExactReal,
    b: ExactReal,
    op: fn(Rational, Rational) -> Option<Rational>,
    build: fn(Box<ExactReal>, Box<ExactReal>) -> ExactReal,
) -> ExactReal {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        if let Some(r) = op(x, y) {
            return ExactReal::Rational(r);
        }
    }
    build(Box::new(a), Box::new(b))
}

impl Add for ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: ExactReal) -> ExactReal {
        fold(self, rhs, |x, y| Some(x + y), ExactReal::Add)
    }
}

impl Sub for ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: ExactReal) -> ExactReal {
        fold(self, rhs, |x, y| Some(x - y), ExactReal::Sub)
    }
}

impl Mul for ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: ExactReal) -> ExactReal {
        fold(self, rhs, |x, y| Some(x * y), ExactReal::Mul)
    }
}

impl Div for ExactReal {
    type Output = ExactReal;
    fn div(self, rhs: ExactReal) -> ExactReal {
        fold(self, rhs, |x, y| if y == 0 { None } else { Some(x / y) }, ExactReal::Div)
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        match self.as_rational() {
            Some(r) => ExactReal::Rational(-r),
            None => ExactReal::Neg(Box::new(self)),
        }
    }
}

macro_rules! ref_ops {
    ($tr:ident, $method:ident) => {
        impl $tr<&ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                self.clone().$method(rhs.clone())
            }
        }
    };
}
ref_ops!(Add, add);
ref_ops!(Sub, sub);
ref_ops!(Mul, mul);
ref_ops!(Div, div);

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        ExactReal::int(n)
    }
}

impl From<Rational> for ExactReal {
    fn from(r: Rational) -> Self {
        ExactReal::Rational(r)
    }
}

impl FromStr for ExactReal {
    type Err = Error;

    /// Grammar: `+ - * / ^`, parentheses, decimal or integer literals, `pi`,
    /// `sqrt(..)`, and implicit multiplication (`2pi`, `3sqrt(2)`).
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { s: s.as_bytes(), i: 0, src: s };
        let e = p.expr()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(Error::Parse(s.to_string()));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self) -> Error {
        Error::Parse(self.src.to_string())
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<ExactReal> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.i += 1;
                    acc = acc + self.term()?;
                }
                b'-' => {
                    self.i += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ExactReal> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.i += 1;
                    acc = acc * self.unary()?;
                }
                b'/' => {
                    self.i += 1;
                    let d = self.unary()?;
                    if d.as_rational().is_some_and(|r| r == 0) {
                        return Err(self.err());
                    }
                    acc = acc / d;
                }
                b'(' | b'p' | b's' => acc = acc * self.power()?,
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ExactReal> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ExactReal> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let neg = if self.peek() == Some(b'-') {
                self.i += 1;
                true
            } else {
                false
            };
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let n: i32 = self.src[start..self.i].parse().map_err(|_| self.err())?;
            return Ok(base.powi(if neg { -n } else { n }));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ExactReal> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err());
                }
                self.i += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => {
                let rest = &self.src[self.i..];
                if rest.starts_with("pi") {
                    self.i += 2;
                    Ok(ExactReal::Pi)
                } else if rest.starts_with("sqrt") {
                    self.i += 4;
                    if self.peek() != Some(b'(') {
                        return Err(self.err());
                    }
                    Ok(self.primary()?.sqrt())
                } else {
                    Err(self.err())
                }
            }
            None => Err(self.err()),
        }
    }

    fn number(&mut self) -> Result<ExactReal> {
        let start = self.i;
        let digits = |p: &mut Self| {
            while p.i < p.s.len() && p.s[p.i].is_ascii_digit() {
                p.i += 1;
            }
        };
        digits(self);
        let int_part = &self.src[start..self.i];
        let mut frac_part = "";
        if self.i < self.s.len() && self.s[self.i] == b'.' {
            self.i += 1;
            let f0 = self.i;
            digits(self);
            frac_part = &self.src[f0..self.i];
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(self.err());
        }
        let mut exp: i64 = 0;
        if self.i < self.s.len() && (self.s[self.i] == b'e' || self.s[self.i] == b'E') {
            self.i += 1;
            let e0 = self.i;
            if self.i < self.s.len() && (self.s[self.i] == b'-' || self.s[self.i] == b'+') {
                self.i += 1;
            }
            digits(self);
            exp = self.src[e0..self.i].parse().map_err(|_| self.err())?;
        }
        let mantissa: Integer = format!("{int_part}{frac_part}")
            .trim_start_matches('0')
            .parse::<Integer>()
            .unwrap_or_default();
        let scale = exp - frac_part.len() as i64;
        let ten = Rational::from(10);
        let factor = ten.pow(i32::try_from(scale).map_err(|_| self.err())?);
        Ok(ExactReal::Rational(Rational::from(mantissa) * factor))
    }
}
