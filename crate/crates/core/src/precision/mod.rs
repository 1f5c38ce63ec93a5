//! Arbitrary-precision scalars and the Gamma / Pochhammer / phase primitives
//! the series engines are built on.
//!
//! Precision is expressed in decimal digits. A value created at `d` digits is
//! stored in an MPFR float of [`bits_for_digits`]`(d)` bits; binary operations
//! on two values produce a result at the smaller of the two digit counts.

mod exact;
mod gamma;
mod trig;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::{Complex, Float};

use crate::error::{Error, Result};

pub use exact::ExactReal;
pub use gamma::{
    gauss_legendre_gamma_check, log_gamma, pochhammer, pochhammer_multiplication_check,
    PochhammerArg,
};
pub(crate) use gamma::{bernoulli, gamma_real, ln_gamma_complex, ln_gamma_real};
pub use trig::{trig_at_quarter_pi, QuarterPhase, TrigKind};

/// Binary precision used for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits.max(1) as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

/// Decimal digits carried by an MPFR float of `bits` bits (inverse of
/// [`bits_for_digits`], rounded down).
pub fn digits_for_bits(bits: u32) -> u32 {
    ((bits.saturating_sub(8)) as f64 / std::f64::consts::LOG2_10).floor().max(1.0) as u32
}

/// log10 |x| for an MPFR float, without overflowing f64 for huge exponents.
pub(crate) fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if !x.is_finite() {
        return f64::INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log10() + e as f64 * std::f64::consts::LOG10_2
}

#[derive(Clone, Debug)]
pub struct PrecisionReal {
    value: Float,
    digits: u32,
}

impl PrecisionReal {
    pub fn from_float(value: Float, digits: u32) -> Self {
        let mut value = value;
        value.set_prec(bits_for_digits(digits));
        Self { value, digits }
    }

    pub fn from_f64(x: f64, digits: u32) -> Self {
        Self { value: Float::with_val(bits_for_digits(digits), x), digits }
    }

    pub fn from_i64(x: i64, digits: u32) -> Self {
        Self { value: Float::with_val(bits_for_digits(digits), x), digits }
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_i64(0, digits)
    }

    pub fn infinity(digits: u32) -> Self {
        Self { value: Float::with_val(bits_for_digits(digits), rug::float::Special::Infinity), digits }
    }

    pub fn from_exact(x: &ExactReal, digits: u32) -> Self {
        Self { value: x.eval(bits_for_digits(digits)), digits }
    }

    /// Parses a decimal literal (`1.25e-3`) or, failing that, an exact
    /// expression such as `3/4`, `2pi` or `(13-4*sqrt(3))/144`.
    pub fn parse(s: &str, digits: u32) -> Result<Self> {
        let bits = bits_for_digits(digits);
        if let Ok(p) = Float::parse(s.trim()) {
            return Ok(Self { value: Float::with_val(bits, p), digits });
        }
        let e: ExactReal = s.parse()?;
        Ok(Self { value: e.eval(bits), digits })
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn into_float(self) -> Float {
        self.value
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn with_digits(&self, digits: u32) -> Self {
        Self::from_float(self.value.clone(), digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn abs(&self) -> Self {
        Self { value: self.value.clone().abs(), digits: self.digits }
    }

    pub fn sqrt(&self) -> Self {
        Self { value: self.value.clone().sqrt(), digits: self.digits }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// Scientific notation with exactly `digits` significant digits.
    /// Parsing the string back at the same digit count recovers the value to
    /// within half a decimal unit in the last place.
    pub fn to_decimal_string(&self) -> String {
        format_float(&self.value, self.digits)
    }

    /// Shorter rendering for human-facing output.
    pub fn to_short_string(&self, significant: u32) -> String {
        format_float(&self.value, significant.min(self.digits))
    }
}

pub(crate) fn format_float(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.to_string();
    }
    // value = 0.d1d2… × 10^exp; render as d1.d2…e(exp-1)
    let (neg, mant, exp) = x.to_sign_string_exp(10, Some(digits.max(1) as usize));
    let exp = exp.expect("finite nonzero value has an exponent");
    let sign = if neg { "-" } else { "" };
    let (head, tail) = mant.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{}", exp - 1)
    } else {
        format!("{sign}{head}.{tail}e{}", exp - 1)
    }
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialEq for PrecisionReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for PrecisionReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&PrecisionReal> for &PrecisionReal {
            type Output = PrecisionReal;
            fn $method(self, rhs: &PrecisionReal) -> PrecisionReal {
                let digits = self.digits.min(rhs.digits);
                let v = Float::with_val(bits_for_digits(digits), &self.value $op &rhs.value);
                PrecisionReal { value: v, digits }
            }
        }
        impl $tr<PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $method(self, rhs: PrecisionReal) -> PrecisionReal {
                (&self).$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl Neg for PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal { value: -self.value, digits: self.digits }
    }
}

impl Neg for &PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        -(self.clone())
    }
}

#[derive(Clone, Debug)]
pub struct PrecisionComplex {
    value: Complex,
    digits: u32,
}

impl PrecisionComplex {
    pub fn from_complex(value: Complex, digits: u32) -> Self {
        let mut value = value;
        let b = bits_for_digits(digits);
        value.set_prec((b, b));
        Self { value, digits }
    }

    pub fn from_f64(re: f64, im: f64, digits: u32) -> Self {
        let b = bits_for_digits(digits);
        Self { value: Complex::with_val(b, (re, im)), digits }
    }

    pub fn from_real(x: &PrecisionReal) -> Self {
        let b = bits_for_digits(x.digits);
        Self { value: Complex::with_val(b, (&x.value, 0)), digits: x.digits }
    }

    pub fn from_parts(re: &PrecisionReal, im: &PrecisionReal) -> Self {
        let digits = re.digits.min(im.digits);
        let b = bits_for_digits(digits);
        Self { value: Complex::with_val(b, (&re.value, &im.value)), digits }
    }

    pub fn from_exact(x: &ExactReal, digits: u32) -> Self {
        let b = bits_for_digits(digits);
        Self { value: Complex::with_val(b, (x.eval(b), 0)), digits }
    }

    /// Parses `re` or `re,im` where each part is anything
    /// [`PrecisionReal::parse`] accepts.
    pub fn parse(s: &str, digits: u32) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        match parts.as_slice() {
            [re] => Ok(Self::from_real(&PrecisionReal::parse(re, digits)?)),
            [re, im] => Ok(Self::from_parts(
                &PrecisionReal::parse(re, digits)?,
                &PrecisionReal::parse(im, digits)?,
            )),
            _ => Err(Error::Parse(s.to_string())),
        }
    }

    pub fn value(&self) -> &Complex {
        &self.value
    }

    pub fn into_complex(self) -> Complex {
        self.value
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn re(&self) -> PrecisionReal {
        PrecisionReal { value: self.value.real().clone(), digits: self.digits }
    }

    pub fn im(&self) -> PrecisionReal {
        PrecisionReal { value: self.value.imag().clone(), digits: self.digits }
    }

    pub fn abs(&self) -> PrecisionReal {
        let b = bits_for_digits(self.digits);
        PrecisionReal { value: Float::with_val(b, self.value.abs_ref()), digits: self.digits }
    }

    pub fn is_real(&self) -> bool {
        self.value.imag().is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.value.real().is_zero() && self.value.imag().is_zero()
    }

    pub fn to_decimal_string(&self) -> String {
        if self.is_real() {
            format_float(self.value.real(), self.digits)
        } else {
            format!(
                "({},{})",
                format_float(self.value.real(), self.digits),
                format_float(self.value.imag(), self.digits)
            )
        }
    }
}

impl fmt::Display for PrecisionComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialEq for PrecisionComplex {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

macro_rules! complex_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&PrecisionComplex> for &PrecisionComplex {
            type Output = PrecisionComplex;
            fn $method(self, rhs: &PrecisionComplex) -> PrecisionComplex {
                let digits = self.digits.min(rhs.digits);
                let b = bits_for_digits(digits);
                let v = Complex::with_val(b, &self.value $op &rhs.value);
                PrecisionComplex { value: v, digits }
            }
        }
        impl $tr<PrecisionComplex> for PrecisionComplex {
            type Output = PrecisionComplex;
            fn $method(self, rhs: PrecisionComplex) -> PrecisionComplex {
                (&self).$method(&rhs)
            }
        }
    };
}

complex_binop!(Add, add, +);
complex_binop!(Sub, sub, -);
complex_binop!(Mul, mul, *);
complex_binop!(Div, div, /);

impl Neg for PrecisionComplex {
    type Output = PrecisionComplex;
    fn neg(self) -> PrecisionComplex {
        PrecisionComplex { value: -self.value, digits: self.digits }
    }
}

/// True if `z` is real and a non-positive integer (a pole of Γ).
pub(crate) fn is_gamma_pole(z: &Complex) -> bool {
    z.imag().is_zero() && z.real().is_integer() && *z.real() <= 0
}

pub(crate) fn is_gamma_pole_real(x: &Float) -> bool {
    x.is_integer() && *x <= 0
}
