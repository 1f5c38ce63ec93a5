//! Finite rearrangement checks, compensated summation, the crude k-tail
//! majorant for the Ramanujan k-sums, and the Hurwitz zeta function used by
//! the closed-form tails.

use std::sync::Arc;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{bernoulli, bits_for_digits, gamma_real, PrecisionComplex, PrecisionReal};

/// Stopping rule shared by the series engines: a term counts as negligible
/// when |t| < 10^-d · max(|partial|, Σ|t| · 10^-w), with d the target digits
/// and w the working digits (the floor is the rounding noise of the sum).
/// The rule fires after three consecutive negligible terms.
#[derive(Clone, Debug)]
pub(crate) struct Stopper {
    target: f64,
    working: f64,
    run: u32,
}

impl Stopper {
    pub(crate) fn new(target_digits: u32, working_digits: u32) -> Self {
        Self { target: target_digits as f64, working: working_digits as f64, run: 0 }
    }

    pub(crate) fn observe(&mut self, term_log10: f64, partial_log10: f64, abs_log10: f64) -> bool {
        let reference = partial_log10.max(abs_log10 - self.working);
        if term_log10 < reference - self.target {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= 3
    }
}

/// A deterministic index → term map.
#[derive(Clone)]
pub struct TermStream {
    term: Arc<dyn Fn(u64) -> PrecisionComplex + Send + Sync>,
    /// ρ with |term(k)| = O(k^-ρ), when known.
    pub decay_hint: Option<f64>,
}

impl TermStream {
    pub fn new(term: impl Fn(u64) -> PrecisionComplex + Send + Sync + 'static) -> Self {
        Self { term: Arc::new(term), decay_hint: None }
    }

    pub fn with_decay(mut self, rho: f64) -> Self {
        self.decay_hint = Some(rho);
        self
    }

    pub fn term(&self, k: u64) -> PrecisionComplex {
        (self.term)(k)
    }
}

/// Sums floats exactly: the accumulator precision covers the full exponent
/// spread of the inputs, so the result does not depend on order.
fn exact_sum<'a>(terms: impl Iterator<Item = &'a Float> + Clone) -> Float {
    let mut max_e = i64::MIN;
    let mut min_e = i64::MAX;
    let mut count = 0u32;
    for t in terms.clone() {
        if t.is_zero() || !t.is_finite() {
            continue;
        }
        let e = t.get_exp().unwrap_or(0) as i64;
        max_e = max_e.max(e);
        min_e = min_e.min(e - t.prec() as i64);
        count += 1;
    }
    if count == 0 {
        return Float::with_val(64, 0);
    }
    // bits from the lowest set position up to the top exponent, plus room for
    // carries out of up to 2^32 additions
    let spread = (max_e - min_e).max(0) as u32;
    let prec = spread + 40;
    let mut acc = Float::with_val(prec, 0);
    for t in terms {
        acc += t;
    }
    acc
}

#[derive(Clone, Debug)]
pub struct DecompositionCheck {
    /// |LHS - RHS| with both orderings accumulated exactly: 0 for any finite
    /// rearrangement.
    pub residual: PrecisionReal,
    /// The same difference when each ordering is summed naively at working
    /// precision.
    pub working_residual: PrecisionReal,
}

/// Σ_{ℓ<count·N} Ω(ℓ) against Σ_{j<N} Σ_{ℓ<count} Ω(Nℓ+j).
pub fn decompose_sum_check(omega: &TermStream, n: u64, count: u64, digits: u32) -> Result<DecompositionCheck> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let bits = bits_for_digits(digits);
    let terms: Vec<PrecisionComplex> = (0..n * count).map(|l| omega.term(l)).collect();
    let re: Vec<Float> = terms.iter().map(|t| t.value().real().clone()).collect();
    let im: Vec<Float> = terms.iter().map(|t| t.value().imag().clone()).collect();
    let order: Vec<usize> = (0..n).flat_map(|j| (0..count).map(move |l| (n * l + j) as usize)).collect();

    let lhs_re = exact_sum(re.iter());
    let lhs_im = exact_sum(im.iter());
    let rhs_re = exact_sum(order.iter().map(|&i| &re[i]));
    let rhs_im = exact_sum(order.iter().map(|&i| &im[i]));
    let d = Float::with_val(bits, Float::with_val(bits, &lhs_re - &rhs_re).hypot(&Float::with_val(bits, &lhs_im - &rhs_im)));

    let naive = |idx: &mut dyn Iterator<Item = usize>| {
        let mut s_re = Float::with_val(bits, 0);
        let mut s_im = Float::with_val(bits, 0);
        for i in idx {
            s_re += &re[i];
            s_im += &im[i];
        }
        (s_re, s_im)
    };
    let (a_re, a_im) = naive(&mut (0..(n * count) as usize));
    let (b_re, b_im) = naive(&mut order.iter().copied());
    let w = Float::with_val(bits, a_re - b_re).hypot(&Float::with_val(bits, a_im - b_im));
    Ok(DecompositionCheck {
        residual: PrecisionReal::from_float(d, digits),
        working_residual: PrecisionReal::from_float(w, digits),
    })
}

#[derive(Clone, Debug)]
pub struct CompensatedSum {
    pub value: PrecisionComplex,
    pub abs_sum: PrecisionReal,
    /// abs_sum / |value|, infinite when the value is 0.
    pub cancellation_index: PrecisionReal,
}

/// Neumaier (improved Kahan) summation of the real and imaginary parts.
#[derive(Clone, Debug)]
pub(crate) struct Neumaier {
    sum: Float,
    comp: Float,
}

impl Neumaier {
    pub(crate) fn new(prec: u32) -> Self {
        Self { sum: Float::with_val(prec, 0), comp: Float::with_val(prec, 0) }
    }

    pub(crate) fn add(&mut self, x: &Float) {
        let prec = self.sum.prec();
        let t = Float::with_val(prec, &self.sum + x);
        if Float::with_val(prec, self.sum.abs_ref()) >= Float::with_val(prec, x.abs_ref()) {
            self.comp += Float::with_val(prec, &self.sum - &t) + x;
        } else {
            self.comp += Float::with_val(prec, x - &t) + &self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> Float {
        Float::with_val(self.sum.prec(), &self.sum + &self.comp)
    }
}

pub fn compensated_sum(terms: &TermStream, count: u64, digits: u32) -> CompensatedSum {
    let bits = bits_for_digits(digits);
    let mut re = Neumaier::new(bits);
    let mut im = Neumaier::new(bits);
    let mut abs = Neumaier::new(bits);
    for k in 0..count {
        let t = terms.term(k);
        re.add(t.value().real());
        im.add(t.value().imag());
        abs.add(&Float::with_val(bits, t.value().abs_ref()));
    }
    let value = rug::Complex::with_val(bits, (re.value(), im.value()));
    let abs_sum = abs.value();
    let mag = Float::with_val(bits, value.abs_ref());
    let ci = if mag.is_zero() {
        Float::with_val(bits, rug::float::Special::Infinity)
    } else {
        Float::with_val(bits, &abs_sum / &mag)
    };
    CompensatedSum {
        value: PrecisionComplex::from_complex(value, digits),
        abs_sum: PrecisionReal::from_float(abs_sum, digits),
        cancellation_index: PrecisionReal::from_float(ci, digits),
    }
}

/// Upper bound on Σ_{k>K} |Θ(k)/k!| · |F(λb+ck)| given
/// sup_{k>K} |Θ(k)/k!| ≤ `theta_bound`, from
/// |F(a)| ≤ ∫ x^(υ-1) e^(-a√x) dx = 2Γ(2υ)/a^(2υ) and the integral
/// comparison Σ_{k>K} f(k) ≤ f(K+1) + ∫_{K+1}^∞ f.
/// Infinite when υ ≤ 1/2 (the majorant is not summable).
pub fn k_tail_bound(
    upsilon: &PrecisionReal,
    b: &PrecisionReal,
    c: &PrecisionReal,
    lam: &PrecisionReal,
    theta_bound: &PrecisionReal,
    k: u64,
) -> Result<PrecisionReal> {
    let digits = upsilon.digits();
    let bits = bits_for_digits(digits) + 16;
    if *c.value() <= 0 {
        return Err(Error::Domain("c must be positive".into()));
    }
    let two_u = Float::with_val(bits, upsilon.value() * 2u32);
    if two_u <= 1 {
        return Ok(PrecisionReal::infinity(digits));
    }
    let lb = Float::with_val(bits, lam.value() * b.value());
    let a1 = Float::with_val(bits, c.value() * (k + 1)) + &lb;
    if a1 <= 0 {
        return Err(Error::Domain("damping lambda*b + c*k must stay positive".into()));
    }
    let g = gamma_real(&two_u, bits)? * 2u32;
    let first = Float::with_val(bits, a1.clone().pow(&Float::with_val(bits, -&two_u)));
    let one_minus = Float::with_val(bits, 1 - &two_u);
    let integral =
        Float::with_val(bits, a1.pow(&one_minus)) / (Float::with_val(bits, c.value() * (&two_u - Float::with_val(bits, 1))));
    let v = g * (first + integral) * theta_bound.value();
    Ok(PrecisionReal::from_float(v, digits))
}

/// ζ(s, q) = Σ_{i≥0} (q+i)^-s for s > 1, q > 0, with a rigorous bound on the
/// Euler–Maclaurin remainder.
pub(crate) fn hurwitz_zeta(s: &Float, q: &Float, prec: u32) -> Result<(Float, Float)> {
    if *s <= 1 || *q <= 0 {
        return Err(Error::Domain(format!("Hurwitz zeta at s = {s}, q = {q}")));
    }
    let wp = prec + 32;
    let sf = s.to_f64();
    let qf = q.to_f64();
    // The correction terms shrink roughly like ((s+2p)/(2π Q))^2; shifting Q
    // past (s + 2P)/π keeps that ratio below 1/4 for the P terms we need.
    let p_max = (prec as f64 * 0.35).ceil() as u32 + 4;
    let want_q = ((sf + 2.0 * p_max as f64) / std::f64::consts::PI).max(4.0);
    let n = if qf < want_q { (want_q - qf).ceil() as u32 } else { 0 };
    let neg_s = Float::with_val(wp, -s);
    let mut direct = Float::with_val(wp, 0);
    let mut x = Float::with_val(wp, q);
    for _ in 0..n {
        direct += Float::with_val(wp, (&x).pow(&neg_s));
        x += 1u32;
    }
    // x = Q = q + n
    let q_pow = Float::with_val(wp, (&x).pow(&neg_s));
    let mut sum = Float::with_val(wp, &q_pow * &x) / Float::with_val(wp, s - 1u32);
    sum += Float::with_val(wp, &q_pow / 2u32);
    let inv = Float::with_val(wp, x.recip_ref());
    let inv2 = Float::with_val(wp, inv.square_ref());
    // (s)_{2p-1} Q^{-s-2p+1} built incrementally
    let mut rising = Float::with_val(wp, s);
    let mut pw = Float::with_val(wp, &q_pow * &inv);
    let mut fact = Float::with_val(wp, 2);
    let eps = Float::with_val(wp, Float::i_exp(1, -(prec as i32) - 8));
    let mut bound = Float::with_val(wp, Constant::Pi);
    for p in 1..=p_max {
        let b = bernoulli(2 * p, wp);
        let term = Float::with_val(wp, &b * &rising) * &pw / &fact;
        sum += &term;
        bound = term.abs();
        let total = Float::with_val(wp, &sum + &direct).abs();
        if bound < Float::with_val(wp, &eps * &total) {
            break;
        }
        // advance (s)_{2p-1} → (s)_{2p+1}, Q power by Q^-2, (2p)! → (2p+2)!
        let a = Float::with_val(wp, s + (2 * p - 1));
        let bb = Float::with_val(wp, s + 2 * p);
        rising *= a * bb;
        pw *= &inv2;
        fact *= Float::with_val(wp, (2 * p + 1) * (2 * p + 2));
    }
    let value = Float::with_val(prec, direct + sum);
    Ok((value, Float::with_val(prec, bound)))
}
