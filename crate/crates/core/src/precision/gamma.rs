//! log Γ by upward argument shift and the Stirling series, Pochhammer symbols,
//! and the multiplication-theorem self-checks.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use super::{bits_for_digits, is_gamma_pole, is_gamma_pole_real, PrecisionComplex, PrecisionReal};
use crate::error::{Error, Result};

thread_local! {
    // Stirling coefficients B_2n / (2n (2n-1)), keyed by a rounded-up precision.
    static STIRLING: RefCell<HashMap<u32, Vec<Float>>> = RefCell::new(HashMap::new());
}

fn prec_bucket(prec: u32) -> u32 {
    prec.div_ceil(64) * 64
}

/// Bernoulli number B_n (B_1 = -1/2) at `prec` bits, from
/// B_2m = (-1)^(m+1) 2 (2m)! ζ(2m) / (2π)^(2m).
pub(crate) fn bernoulli(n: u32, prec: u32) -> Float {
    match n {
        0 => Float::with_val(prec, 1),
        1 => Float::with_val(prec, -0.5),
        _ if n % 2 == 1 => Float::with_val(prec, 0),
        _ => {
            let p = prec + 16;
            let zeta = Float::with_val(p, Float::zeta_u(n));
            let fact = Float::with_val(p, Float::factorial(n));
            let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
            let mut b = zeta * fact * 2u32 / two_pi.pow(n);
            if (n / 2) % 2 == 0 {
                b = -b;
            }
            Float::with_val(prec, b)
        }
    }
}

fn stirling_coeff(n: usize, prec: u32) -> Float {
    let bucket = prec_bucket(prec);
    STIRLING.with(|cache| {
        let mut cache = cache.borrow_mut();
        let v = cache.entry(bucket).or_default();
        while v.len() < n {
            let k = v.len() as u32 + 1;
            let b = bernoulli(2 * k, bucket);
            v.push(b / (2 * k * (2 * k - 1)));
        }
        Float::with_val(prec, &v[n - 1])
    })
}

/// Shift radius: Stirling's series at |w| ≥ R reaches 2^-prec.
fn stirling_radius(prec: u32) -> f64 {
    prec as f64 * LN_2 / (2.0 * PI) + 2.0
}

fn stirling_real(w: &Float, prec: u32) -> Float {
    let ln2pi = (Float::with_val(prec, Constant::Pi) * 2u32).ln();
    let lnw = Float::with_val(prec, w.ln_ref());
    let mut res = Float::with_val(prec, w - 0.5f64) * &lnw - w + ln2pi / 2u32;
    let inv = Float::with_val(prec, w.recip_ref());
    let inv2 = Float::with_val(prec, inv.square_ref());
    let mut pw = inv;
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
    let scale = Float::with_val(prec, res.abs_ref()).max(&Float::with_val(prec, 1));
    for n in 1..10_000 {
        let term = stirling_coeff(n, prec) * &pw;
        res += &term;
        if term.abs() < Float::with_val(prec, &eps * &scale) {
            break;
        }
        pw *= &inv2;
    }
    res
}

fn stirling_complex(w: &Complex, prec: u32) -> Complex {
    let ln2pi = (Float::with_val(prec, Constant::Pi) * 2u32).ln();
    let lnw = Complex::with_val(prec, w.ln_ref());
    let mut res = Complex::with_val(prec, w - 0.5f64) * &lnw - w + ln2pi / 2u32;
    let inv = Complex::with_val(prec, w.recip_ref());
    let inv2 = Complex::with_val(prec, inv.square_ref());
    let mut pw = inv;
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
    let scale = Float::with_val(prec, res.abs_ref()).max(&Float::with_val(prec, 1));
    for n in 1..10_000 {
        let term = Complex::with_val(prec, &pw * stirling_coeff(n, prec));
        res += &term;
        if Float::with_val(prec, term.abs_ref()) < Float::with_val(prec, &eps * &scale) {
            break;
        }
        pw *= &inv2;
    }
    res
}

fn working_prec(prec: u32, magnitude: f64) -> u32 {
    prec + 16 + magnitude.abs().max(2.0).log2().ceil() as u32
}

/// (ln |Γ(x)|, sign Γ(x)) for real x at `prec` bits.
pub(crate) fn ln_gamma_real(x: &Float, prec: u32) -> Result<(Float, i32)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("log Gamma of {x}")));
    }
    if is_gamma_pole_real(x) {
        return Err(Error::Pole(x.to_string()));
    }
    let xf = x.to_f64();
    let wp = working_prec(prec, xf);
    let r = stirling_radius(wp);
    if xf < -r {
        // Γ(x) = π / (sin(πx) Γ(1-x)); reduce x mod 2 exactly before the sine.
        let one_minus = Float::with_val(wp, 1 - x);
        let (lg, _) = ln_gamma_real(&one_minus, wp)?;
        let mut frac = Float::with_val(wp, x % 2u32);
        if frac < 0 {
            frac += 2u32;
        }
        let s = (frac * Float::with_val(wp, Constant::Pi)).sin();
        let sign = if s < 0 { -1 } else { 1 };
        let lpi = Float::with_val(wp, Constant::Pi).ln();
        let v = lpi - s.abs().ln() - lg;
        return Ok((Float::with_val(prec, v), sign));
    }
    let shift = if xf < r { (r - xf).ceil() as u32 } else { 0 };
    let mut w = Float::with_val(wp, x);
    let mut prod = Float::with_val(wp, 1);
    for _ in 0..shift {
        prod *= &w;
        w += 1u32;
    }
    let sign = if prod < 0 { -1 } else { 1 };
    let v = stirling_real(&w, wp) - prod.abs().ln();
    Ok((Float::with_val(prec, v), sign))
}

/// Γ(x) for real x.
pub(crate) fn gamma_real(x: &Float, prec: u32) -> Result<Float> {
    let (l, s) = ln_gamma_real(x, prec + 8)?;
    let v = l.exp();
    Ok(Float::with_val(prec, if s < 0 { -v } else { v }))
}

/// Principal-branch log Γ(z): the branch continuous on ℂ minus the
/// non-positive real axis and real on the positive axis. On the negative axis
/// the imaginary part is -π·⌈-x⌉ (the limit from below), so that
/// `exp(log Γ)` is always Γ.
pub(crate) fn ln_gamma_complex(z: &Complex, prec: u32) -> Result<Complex> {
    if is_gamma_pole(z) {
        return Err(Error::Pole(z.to_string()));
    }
    if !z.real().is_finite() || !z.imag().is_finite() {
        return Err(Error::Domain(format!("log Gamma of {z}")));
    }
    if z.imag().is_zero() {
        let (l, _) = ln_gamma_real(z.real(), prec)?;
        let mut im = Float::with_val(prec, 0);
        if *z.real() < 0 {
            let count = (-z.real().to_f64()).ceil();
            im = Float::with_val(prec, Constant::Pi) * (-count);
        }
        return Ok(Complex::with_val(prec, (l, im)));
    }
    let (re, im) = (z.real().to_f64(), z.imag().to_f64());
    let wp = working_prec(prec, re.hypot(im));
    let r = stirling_radius(wp);
    let shift = if re < r { (r - re).ceil() as u64 } else { 0 };
    if shift > 1_000_000 {
        return Err(Error::Unsupported(format!("log Gamma at Re z = {re}")));
    }
    let mut w = Complex::with_val(wp, z);
    let mut prod = Complex::with_val(wp, (1, 0));
    let mut arg_sum = 0f64;
    for i in 0..shift {
        prod *= &w;
        arg_sum += im.atan2(re + i as f64);
        w += 1u32;
    }
    let mut lp = Complex::with_val(wp, prod.ln_ref());
    // Σ arg(z+i) fixes the branch of log ∏(z+i).
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let turns = ((arg_sum - lp.imag().to_f64()) / (2.0 * PI)).round();
    if turns != 0.0 {
        *lp.mut_imag() += two_pi * turns;
    }
    let v = stirling_complex(&w, wp) - lp;
    Ok(Complex::with_val(prec, v))
}

pub fn log_gamma(z: &PrecisionComplex) -> Result<PrecisionComplex> {
    let prec = bits_for_digits(z.digits());
    Ok(PrecisionComplex::from_complex(ln_gamma_complex(z.value(), prec)?, z.digits()))
}

#[derive(Clone, Debug)]
pub struct PochhammerArg {
    pub lambda: PrecisionComplex,
    pub order: PrecisionComplex,
}

impl PochhammerArg {
    pub fn new(lambda: PrecisionComplex, order: PrecisionComplex) -> Self {
        Self { lambda, order }
    }

    pub fn integer(lambda: PrecisionComplex, n: u64) -> Self {
        let order = PrecisionComplex::from_f64(n as f64, 0.0, lambda.digits());
        Self { lambda, order }
    }

    fn integer_order(&self) -> Option<u64> {
        let o = self.order.value();
        if o.imag().is_zero() && o.real().is_integer() && *o.real() >= 0 {
            o.real().to_integer().and_then(|i| i.to_u64())
        } else {
            None
        }
    }
}

const PRODUCT_LIMIT: u64 = 20_000;

fn pochhammer_product(lambda: &Complex, n: u64, prec: u32) -> Complex {
    let mut acc = Complex::with_val(prec, (1, 0));
    let mut f = Complex::with_val(prec, lambda);
    for _ in 0..n {
        acc *= &f;
        if acc.real().is_zero() && acc.imag().is_zero() {
            break;
        }
        f += 1u32;
    }
    acc
}

/// (λ)_υ. Integer orders use the exact product λ(λ+1)…(λ+n-1) (for large n
/// with λ away from the poles, the log-Gamma difference); other orders use
/// exp(log Γ(λ+υ) - log Γ(λ)).
pub fn pochhammer(arg: &PochhammerArg) -> Result<PrecisionComplex> {
    let digits = arg.lambda.digits().min(arg.order.digits());
    let prec = bits_for_digits(digits);
    let wp = prec + 16;
    let lambda = arg.lambda.value();
    if let Some(n) = arg.integer_order() {
        if n <= PRODUCT_LIMIT || is_gamma_pole(lambda) {
            let v = pochhammer_product(lambda, n, wp);
            return Ok(PrecisionComplex::from_complex(v, digits));
        }
    }
    if is_gamma_pole(lambda) {
        return Err(Error::UndefinedPochhammer(format!(
            "lambda = {} with order {}",
            arg.lambda, arg.order
        )));
    }
    let top = Complex::with_val(wp, lambda + arg.order.value());
    if is_gamma_pole(&top) {
        return Err(Error::Pole(format!("lambda + order = {top}")));
    }
    let l = ln_gamma_complex(&top, wp)? - ln_gamma_complex(lambda, wp)?;
    Ok(PrecisionComplex::from_complex(l.exp(), digits))
}

fn relative_residual(lhs: &Complex, rhs: &Complex, prec: u32) -> Float {
    let d = Complex::with_val(prec, lhs - rhs);
    let scale = Float::with_val(prec, lhs.abs_ref()).max(&Float::with_val(prec, 1));
    Float::with_val(prec, d.abs_ref()) / scale
}

/// Residual of (λ)_{mn} = m^{mn} ∏_{j=1}^{m} ((λ+j-1)/m)_n, relative to
/// max(1, |(λ)_{mn}|).
pub fn pochhammer_multiplication_check(
    lambda: &PrecisionComplex,
    m: u32,
    n: u64,
) -> Result<PrecisionReal> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let digits = lambda.digits();
    let wp = bits_for_digits(digits) + 16;
    let mn = m as u64 * n;
    let lhs = pochhammer_product(lambda.value(), mn, wp);
    let mut rhs = Complex::with_val(wp, (Float::with_val(wp, m).pow(mn), 0));
    for j in 1..=m {
        let shifted = Complex::with_val(wp, lambda.value() + (j - 1)) / m;
        rhs *= pochhammer_product(&shifted, n, wp);
    }
    let r = relative_residual(&lhs, &rhs, wp);
    Ok(PrecisionReal::from_float(r, digits))
}

/// Residual of the Gauss–Legendre multiplication theorem
/// Γ(mz) = (2π)^((1-m)/2) m^(mz-1/2) ∏_{j=1}^{m} Γ(z+(j-1)/m),
/// computed as |exp(log RHS - log LHS) - 1|.
pub fn gauss_legendre_gamma_check(m: u32, z: &PrecisionComplex) -> Result<PrecisionReal> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let digits = z.digits();
    let wp = bits_for_digits(digits) + 16;
    let mz = Complex::with_val(wp, z.value() * m);
    if is_gamma_pole(&mz) {
        return Err(Error::Pole(format!("m z = {mz}")));
    }
    let lhs = ln_gamma_complex(&mz, wp)?;
    let mut rhs = Complex::with_val(wp, (0, 0));
    if m > 1 {
        let ln2pi = (Float::with_val(wp, Constant::Pi) * 2u32).ln();
        let lnm = Float::with_val(wp, m).ln();
        let c = ln2pi * (1.0 - m as f64) / 2u32;
        rhs += c;
        rhs += Complex::with_val(wp, &mz - 0.5f64) * lnm;
    }
    for j in 1..=m {
        let arg = Complex::with_val(wp, z.value() + Float::with_val(wp, j - 1) / m);
        rhs += ln_gamma_complex(&arg, wp)?;
    }
    let ratio = Complex::with_val(wp, &rhs - &lhs).exp() - 1u32;
    let r = Float::with_val(wp, ratio.abs_ref());
    Ok(PrecisionReal::from_float(r, digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> PrecisionComplex {
        PrecisionComplex::from_f64(re, im, 50)
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        let d = Float::with_val(300, a - b).abs();
        let s = Float::with_val(300, b.abs_ref()).max(&Float::with_val(300, 1));
        (d / s).to_f64() < tol
    }

    #[test]
    fn integer_and_half_integer_values() {
        let l5 = log_gamma(&c(5.0, 0.0)).unwrap();
        assert!(close(l5.value().real(), &Float::with_val(200, 24).ln(), 1e-48));
        let lh = log_gamma(&c(0.5, 0.0)).unwrap();
        let sqrt_pi = Float::with_val(200, Constant::Pi).sqrt().ln();
        assert!(close(lh.value().real(), &sqrt_pi, 1e-48));
        for n in 1..60u32 {
            let (l, s) = ln_gamma_real(&Float::with_val(200, n), 200).unwrap();
            assert_eq!(s, 1);
            let f = Float::with_val(200, Float::factorial(n - 1)).ln();
            assert!(close(&l, &f, 1e-55), "{n}");
        }
    }

    #[test]
    fn recurrence_oracle_at_3_7() {
        // Γ(3.7) from Γ(3.7 + 40) (Stirling) stepped down by Γ(z) = Γ(z+1)/z,
        // with the Stirling leg checked against (N-1)! at a nearby integer.
        let prec = 240;
        let z = Float::with_val(prec, 3.7);
        let (l, _) = ln_gamma_real(&z, prec).unwrap();
        let mut acc = Float::with_val(prec, 0);
        let mut w = Float::with_val(prec, &z);
        for _ in 0..40 {
            acc += Float::with_val(prec, w.ln_ref());
            w += 1u32;
        }
        let big = stirling_real(&w, prec);
        let oracle = big - acc;
        assert!(close(&l, &oracle, 1e-60));
        assert!(close(&stirling_real(&Float::with_val(prec, 44), prec), &Float::with_val(prec, Float::factorial(43)).ln(), 1e-60));
    }

    #[test]
    fn agrees_with_mpfr_on_reals() {
        for &x in &[0.01, 0.3, 1.7, 9.99, 123.456, -0.5, -3.25, -47.9, -120.3, 1e6 + 0.25] {
            let f = Float::with_val(200, x);
            let (l, s) = ln_gamma_real(&f, 200).unwrap();
            let (refl, ord) = Float::with_val(200, &f).ln_abs_gamma();
            let rs = if ord == std::cmp::Ordering::Less { -1 } else { 1 };
            assert_eq!(s, rs, "{x}");
            assert!(close(&l, &refl, 1e-55), "{x}");
        }
    }

    #[test]
    fn complex_values_exponentiate_to_gamma() {
        // Γ(1+i) Γ(1-i) = π / sinh π and Γ(z+1) = z Γ(z).
        let z = c(1.0, 1.0);
        let a = log_gamma(&z).unwrap();
        let b = log_gamma(&c(1.0, -1.0)).unwrap();
        let prod = Complex::with_val(200, a.value() + b.value()).exp();
        let pi = Float::with_val(200, Constant::Pi);
        let expect = Float::with_val(200, &pi / pi.clone().sinh());
        assert!(close(prod.real(), &expect, 1e-48));
        assert!(prod.imag().to_f64().abs() < 1e-48);
        let w = c(-2.3, 4.1);
        let l0 = log_gamma(&w).unwrap();
        let l1 = log_gamma(&(&w + &c(1.0, 0.0))).unwrap();
        let lhs = Complex::with_val(200, l1.value() - l0.value()).exp();
        let d = Complex::with_val(200, &lhs - w.value());
        assert!(Float::with_val(200, d.abs_ref()).to_f64() < 1e-47);
    }

    #[test]
    fn principal_branch_is_continuous_off_axis() {
        // Imaginary part must move smoothly across Re z = 0 at fixed Im z.
        let mut prev: Option<f64> = None;
        for i in 0..40 {
            let re = -8.0 + i as f64 * 0.4;
            let l = log_gamma(&c(re, 0.7)).unwrap();
            let im = l.value().imag().to_f64();
            if let Some(p) = prev {
                assert!((im - p).abs() < 2.0, "jump at {re}: {p} -> {im}");
            }
            prev = Some(im);
        }
    }

    #[test]
    fn poles_are_rejected() {
        for x in [0.0, -1.0, -17.0] {
            assert!(matches!(log_gamma(&c(x, 0.0)), Err(Error::Pole(_))));
        }
    }

    #[test]
    fn pochhammer_examples() {
        let v = pochhammer(&PochhammerArg::integer(c(1.0, 0.0), 6)).unwrap();
        assert_eq!(v.value().real().to_f64(), 720.0);
        let v = pochhammer(&PochhammerArg::integer(c(2.5, 0.0), 0)).unwrap();
        assert_eq!(v.value().real().to_f64(), 1.0);
        let v = pochhammer(&PochhammerArg::integer(c(2.0, 0.0), 3)).unwrap();
        assert_eq!(v.value().real().to_f64(), 24.0);
        let v = pochhammer(&PochhammerArg::integer(c(-3.0, 0.0), 5)).unwrap();
        assert!(v.is_zero());
        let half = pochhammer(&PochhammerArg::new(c(1.0, 0.0), c(0.5, 0.0))).unwrap();
        let expect = Float::with_val(200, Constant::Pi).sqrt() / 2u32;
        assert!(close(half.value().real(), &expect, 1e-48));
        assert!(matches!(
            pochhammer(&PochhammerArg::new(c(-2.0, 0.0), c(0.5, 0.0))),
            Err(Error::UndefinedPochhammer(_))
        ));
    }

    #[test]
    fn factorials_exact_to_fifty() {
        for n in 0..=50u32 {
            let v = pochhammer(&PochhammerArg::integer(c(1.0, 0.0), n as u64)).unwrap();
            let f = Float::with_val(400, Float::factorial(n));
            assert_eq!(Float::with_val(400, v.value().real()), f, "{n}");
        }
    }

    #[test]
    fn multiplication_checks() {
        assert!(pochhammer_multiplication_check(&c(1.0, 0.0), 2, 1).unwrap().is_zero());
        for (l, m, n) in [(3.0, 4, 2), (0.3, 3, 5), (-1.7, 5, 4)] {
            let r = pochhammer_multiplication_check(&c(l, 0.0), m, n).unwrap();
            assert!(r.to_f64() < 1e-45, "{l} {m} {n}: {r}");
        }
        assert!(gauss_legendre_gamma_check(1, &c(2.7, -0.4)).unwrap().is_zero());
        assert!(gauss_legendre_gamma_check(2, &c(1.0, 0.0)).unwrap().to_f64() < 1e-45);
        assert!(gauss_legendre_gamma_check(3, &c(0.8, 0.0)).unwrap().to_f64() < 1e-45);
        assert!(gauss_legendre_gamma_check(2, &c(-1.0, 0.0)).is_err());
    }
}
