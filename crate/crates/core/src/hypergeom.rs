//! Generalized hypergeometric series by direct summation.
//!
//! Arguments such as the −a⁴/(64y²) of the Ramanujan ₂F₃ pieces make the
//! terms swell by hundreds of orders of magnitude before they decay. The
//! summation precision is raised from an f64 scan of the term magnitudes, and
//! the achieved cancellation is checked afterwards (one retry if the scan
//! under-estimated it). Parameters therefore have to be available at the
//! escalated precision: [`eval_pfq_exact`] takes exact parameters, while
//! [`eval_pfq`] treats the stored values as exact.

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::precision::{
    bits_for_digits, is_gamma_pole, log10_abs, ExactReal, PrecisionComplex, PrecisionReal,
};
use crate::seriestools::Stopper;

#[derive(Clone, Debug)]
pub struct HypergeomParams {
    pub num: Vec<PrecisionComplex>,
    pub den: Vec<PrecisionComplex>,
    pub arg: PrecisionComplex,
}

impl HypergeomParams {
    pub fn new(num: Vec<PrecisionComplex>, den: Vec<PrecisionComplex>, arg: PrecisionComplex) -> Result<Self> {
        for b in &den {
            if is_gamma_pole(b.value()) {
                return Err(Error::Pole(format!("denominator parameter {b}")));
            }
        }
        Ok(Self { num, den, arg })
    }

    /// Real parameters from f64 values (taken as exact binary values).
    pub fn real(num: &[f64], den: &[f64], z: f64, digits: u32) -> Result<Self> {
        let c = |x: &f64| PrecisionComplex::from_f64(*x, 0.0, digits);
        Self::new(num.iter().map(c).collect(), den.iter().map(c).collect(), c(&z))
    }

    pub fn p(&self) -> usize {
        self.num.len()
    }

    pub fn q(&self) -> usize {
        self.den.len()
    }

    fn digits(&self) -> u32 {
        self.num.iter().chain(&self.den).map(|x| x.digits()).chain([self.arg.digits()]).min().unwrap_or(50)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceTag {
    /// p ≤ q, or a terminating (polynomial) series.
    EntireInZ,
    /// p = q+1, |z| < 1.
    DiskConvergent,
    /// p = q+1, |z| = 1, Re ω > 0.
    BoundaryAbsolute,
    /// p = q+1, |z| = 1, z ≠ 1, −1 < Re ω ≤ 0.
    BoundaryConditional,
    /// Everything else, including p > q+1 for any z (z = 0 still evaluates
    /// to 1).
    Divergent,
}

#[derive(Clone, Debug)]
pub struct ConvergenceClass {
    pub tag: ConvergenceTag,
    /// ω = Σβ − Σα.
    pub omega: PrecisionComplex,
}

#[derive(Clone, Debug)]
pub struct SeriesEvaluation {
    pub value: PrecisionComplex,
    pub terms_used: u64,
    pub abs_sum: PrecisionReal,
    pub cancellation_index: PrecisionReal,
    pub trunc_error: PrecisionReal,
    pub class: ConvergenceClass,
    /// Digits the summation actually ran at.
    pub working_digits: u32,
}

pub(crate) fn is_nonpositive_integer(z: &Complex) -> bool {
    is_gamma_pole(z)
}

fn omega_of(num: &[Complex], den: &[Complex], prec: u32) -> Complex {
    let mut w = Complex::with_val(prec, (0, 0));
    for b in den {
        w += b;
    }
    for a in num {
        w -= a;
    }
    w
}

fn classify_raw(num: &[Complex], den: &[Complex], z: &Complex, prec: u32) -> ConvergenceTag {
    let (p, q) = (num.len(), den.len());
    if num.iter().any(is_nonpositive_integer) || p <= q {
        return ConvergenceTag::EntireInZ;
    }
    if p > q + 1 {
        return ConvergenceTag::Divergent;
    }
    let r2 = Float::with_val(prec, z.norm_ref());
    let gap = Float::with_val(prec, &r2 - 1u32);
    let tiny = Float::with_val(prec, Float::i_exp(1, 16 - prec as i32));
    if gap.clone().abs() <= tiny {
        let om = omega_of(num, den, prec);
        let re = om.real().clone();
        let is_one = z.imag().is_zero() && *z.real() > 0;
        if re > 0 {
            ConvergenceTag::BoundaryAbsolute
        } else if !is_one && re > -1 {
            ConvergenceTag::BoundaryConditional
        } else {
            ConvergenceTag::Divergent
        }
    } else if gap < 0 {
        ConvergenceTag::DiskConvergent
    } else {
        ConvergenceTag::Divergent
    }
}

pub fn classify(params: &HypergeomParams) -> ConvergenceClass {
    let digits = params.digits();
    let prec = bits_for_digits(digits);
    let num: Vec<Complex> = params.num.iter().map(|x| x.value().clone()).collect();
    let den: Vec<Complex> = params.den.iter().map(|x| x.value().clone()).collect();
    ConvergenceClass {
        tag: classify_raw(&num, &den, params.arg.value(), prec),
        omega: PrecisionComplex::from_complex(omega_of(&num, &den, prec), digits),
    }
}

/// Parameters materialised at a given binary precision.
pub(crate) struct RawParams {
    pub num: Vec<Complex>,
    pub den: Vec<Complex>,
    pub z: Complex,
}

#[derive(Clone, Debug)]
pub(crate) struct RawSeries {
    pub value: Complex,
    pub abs_sum: Float,
    pub terms: u64,
    pub trunc: Float,
    pub tag: ConvergenceTag,
    pub omega: Complex,
    pub working_digits: u32,
}

#[derive(Clone, Copy, Debug)]
pub struct PfqOptions {
    /// Hard cap on the escalated working digits, as a multiple of the target.
    pub max_digits_factor: u32,
    /// Absolute cap on the working digits regardless of the factor.
    pub max_digits_floor: u32,
    pub max_terms: u64,
}

impl Default for PfqOptions {
    fn default() -> Self {
        Self { max_digits_factor: 20, max_digits_floor: 400, max_terms: 2_000_000 }
    }
}

impl PfqOptions {
    pub(crate) fn cap(&self, digits: u32) -> u32 {
        (digits * self.max_digits_factor).max(self.max_digits_floor)
    }
}

fn to_f64_pair(z: &Complex) -> (f64, f64) {
    (z.real().to_f64(), z.imag().to_f64())
}

/// f64 walk over log|t_n|: returns log10 of the largest term (t_0 = 1).
fn scan_peak(num: &[(f64, f64)], den: &[(f64, f64)], z: (f64, f64), digits: u32, max_terms: u64) -> f64 {
    let lz = z.0.hypot(z.1).ln();
    let max_beta = den.iter().map(|b| b.0.hypot(b.1)).fold(0.0, f64::max);
    let mut logt = 0.0f64;
    let mut peak = 0.0f64;
    let drop = (digits as f64 + 30.0) * std::f64::consts::LN_10;
    for n in 0..max_terms {
        let nf = n as f64;
        let mut lr = lz - (nf + 1.0).ln();
        for a in num {
            let m = (a.0 + nf).hypot(a.1);
            if m == 0.0 {
                return peak / std::f64::consts::LN_10;
            }
            lr += m.ln();
        }
        for b in den {
            lr -= (b.0 + nf).hypot(b.1).ln();
        }
        logt += lr;
        peak = peak.max(logt);
        if lr < 0.0 && nf > max_beta && logt < peak - drop {
            break;
        }
    }
    peak / std::f64::consts::LN_10
}

/// Ratio-bound B_n ≥ sup_{m≥n} |t_{m+1}/t_m|, valid for n > max|β|; each
/// factor (|α|+m)/(m-|β|) and 1/(m+1) decreases in m.
fn ratio_bound(num_abs: &[f64], den_abs: &[f64], zabs: f64, n: f64) -> f64 {
    let mut b = zabs / (n + 1.0);
    for a in num_abs {
        b *= a + n;
    }
    for d in den_abs {
        let g = n - d;
        if g <= 0.0 {
            return f64::INFINITY;
        }
        b /= g;
    }
    b
}

fn sum_at(params: &RawParams, target: u32, working: u32, opts: &PfqOptions) -> Result<RawSeries> {
    let prec = bits_for_digits(working);
    let tag = classify_raw(&params.num, &params.den, &params.z, prec);
    let omega = omega_of(&params.num, &params.den, prec);
    let num_abs: Vec<f64> = params.num.iter().map(|a| Float::with_val(64, a.abs_ref()).to_f64()).collect();
    let den_abs: Vec<f64> = params.den.iter().map(|b| Float::with_val(64, b.abs_ref()).to_f64()).collect();
    let zabs = Float::with_val(64, params.z.abs_ref()).to_f64();

    let mut t = Complex::with_val(prec, (1, 0));
    let mut sum = Complex::with_val(prec, (1, 0));
    let mut abs_sum = Float::with_val(64, 1);
    let mut stop = Stopper::new(target + 2, working);
    let mut n: u64 = 0;
    let mut trunc = Float::with_val(64, 0);
    let boundary = matches!(tag, ConvergenceTag::BoundaryAbsolute | ConvergenceTag::BoundaryConditional);
    loop {
        let nf = Float::with_val(prec, n);
        let mut r = Complex::with_val(prec, &params.z);
        for a in &params.num {
            r *= Complex::with_val(prec, a + &nf);
        }
        let mut d = Complex::with_val(prec, (n + 1, 0));
        for b in &params.den {
            d *= Complex::with_val(prec, b + &nf);
        }
        r /= d;
        t *= r;
        n += 1;
        if t.real().is_zero() && t.imag().is_zero() {
            break;
        }
        sum += &t;
        let ta = Float::with_val(64, t.abs_ref());
        abs_sum += &ta;
        let small = stop.observe(
            log10_abs(&ta),
            log10_abs(&Float::with_val(64, sum.abs_ref())),
            log10_abs(&abs_sum),
        );
        if small {
            let bnd = ratio_bound(&num_abs, &den_abs, zabs, n as f64);
            if bnd < 1.0 {
                trunc = ta * (bnd / (1.0 - bnd));
                break;
            }
        }
        if n >= opts.max_terms {
            if boundary {
                // algebraic tail t_n ~ n^(-Re ω - 1): Σ_{m>n} |t_m| ≈ |t_n| n / Re ω
                let re = omega.real().to_f64();
                trunc = if re > 0.0 { ta * (n as f64 / re) } else { ta };
                break;
            }
            return Err(Error::NonConvergence(format!("pFq not converged after {n} terms")));
        }
    }
    Ok(RawSeries { value: sum, abs_sum, terms: n + 1, trunc, tag, omega, working_digits: working })
}

/// Sums ₚFᵩ to `target` significant digits. `build` produces the parameters
/// at a requested binary precision.
pub(crate) fn pfq_raw(build: &dyn Fn(u32) -> RawParams, target: u32, opts: &PfqOptions) -> Result<RawSeries> {
    let probe = build(64);
    for b in &probe.den {
        if is_nonpositive_integer(b) {
            return Err(Error::Pole(format!("denominator parameter {b}")));
        }
    }
    let tag = classify_raw(&probe.num, &probe.den, &probe.z, 64);
    if probe.z.real().is_zero() && probe.z.imag().is_zero() {
        let prec = bits_for_digits(target);
        return Ok(RawSeries {
            value: Complex::with_val(prec, (1, 0)),
            abs_sum: Float::with_val(64, 1),
            terms: 1,
            trunc: Float::with_val(64, 0),
            tag,
            omega: omega_of(&probe.num, &probe.den, prec),
            working_digits: target,
        });
    }
    if tag == ConvergenceTag::Divergent {
        return Err(Error::Divergent(format!(
            "{}F{} at |z| = {}",
            probe.num.len(),
            probe.den.len(),
            Float::with_val(64, probe.z.abs_ref()).to_f64()
        )));
    }
    let num: Vec<(f64, f64)> = probe.num.iter().map(to_f64_pair).collect();
    let den: Vec<(f64, f64)> = probe.den.iter().map(to_f64_pair).collect();
    let peak = scan_peak(&num, &den, to_f64_pair(&probe.z), target, opts.max_terms);
    let cap = opts.cap(target);
    let mut guard = peak.max(0.0).ceil() as u32 + 6;
    for attempt in 0..2 {
        let working = target + guard;
        if working > cap {
            return Err(Error::PrecisionExhausted { needed: working, cap });
        }
        let params = build(bits_for_digits(working) + 16);
        let s = sum_at(&params, target, working, opts)?;
        let mag = Float::with_val(64, s.value.abs_ref());
        let loss = if mag.is_zero() { f64::INFINITY } else { log10_abs(&s.abs_sum) - log10_abs(&mag) };
        if attempt == 1 || loss + 3.0 <= guard as f64 || !loss.is_finite() {
            return Ok(s);
        }
        guard = (loss.ceil() as u32).saturating_add(8);
    }
    unreachable!()
}

fn finish(raw: RawSeries, digits: u32) -> SeriesEvaluation {
    let prec = bits_for_digits(digits);
    let mag = Float::with_val(prec, raw.value.abs_ref());
    let ci = if mag.is_zero() {
        Float::with_val(prec, rug::float::Special::Infinity)
    } else {
        Float::with_val(prec, &raw.abs_sum / &mag)
    };
    SeriesEvaluation {
        value: PrecisionComplex::from_complex(raw.value, digits),
        terms_used: raw.terms,
        abs_sum: PrecisionReal::from_float(raw.abs_sum, digits),
        cancellation_index: PrecisionReal::from_float(ci, digits),
        trunc_error: PrecisionReal::from_float(raw.trunc, digits),
        class: ConvergenceClass { tag: raw.tag, omega: PrecisionComplex::from_complex(raw.omega, digits) },
        working_digits: raw.working_digits,
    }
}

/// ₚFᵩ(α; β; z) with the stored parameter values taken as exact.
pub fn eval_pfq(params: &HypergeomParams, digits: u32) -> Result<SeriesEvaluation> {
    eval_pfq_with(params, digits, &PfqOptions::default())
}

pub fn eval_pfq_with(params: &HypergeomParams, digits: u32, opts: &PfqOptions) -> Result<SeriesEvaluation> {
    HypergeomParams::new(params.num.clone(), params.den.clone(), params.arg.clone())?;
    let build = |prec: u32| {
        let up = |x: &PrecisionComplex| Complex::with_val(prec, x.value());
        RawParams { num: params.num.iter().map(up).collect(), den: params.den.iter().map(up).collect(), z: up(&params.arg) }
    };
    Ok(finish(pfq_raw(&build, digits, opts)?, digits))
}

/// ₚFᵩ with real exact parameters, materialised at whatever precision the
/// summation needs.
pub fn eval_pfq_exact(num: &[ExactReal], den: &[ExactReal], z: &ExactReal, digits: u32) -> Result<SeriesEvaluation> {
    Ok(finish(pfq_exact_raw(num, den, z, digits, &PfqOptions::default())?, digits))
}

pub(crate) fn pfq_exact_raw(
    num: &[ExactReal],
    den: &[ExactReal],
    z: &ExactReal,
    digits: u32,
    opts: &PfqOptions,
) -> Result<RawSeries> {
    let build = |prec: u32| {
        let up = |x: &ExactReal| Complex::with_val(prec, (x.eval(prec), 0));
        RawParams { num: num.iter().map(up).collect(), den: den.iter().map(up).collect(), z: up(z) }
    };
    pfq_raw(&build, digits, opts)
}

/// Lommel's function s_{μ,ν}(z) = z^(μ+1)/((μ-ν+1)(μ+ν+1)) ·
/// ₁F₂(1; (μ-ν+3)/2, (μ+ν+3)/2; -z²/4).
pub fn lommel(mu: &PrecisionComplex, nu: &PrecisionComplex, z: &PrecisionComplex, digits: u32) -> Result<SeriesEvaluation> {
    let prec = bits_for_digits(digits) + 16;
    let odd_negative = |w: &Complex| {
        if !w.imag().is_zero() || !w.real().is_integer() || *w.real() >= 0 {
            return false;
        }
        w.real().to_integer().map(|i| i.is_odd()).unwrap_or(false)
    };
    let diff = Complex::with_val(prec, mu.value() - nu.value());
    let sum = Complex::with_val(prec, mu.value() + nu.value());
    if odd_negative(&diff) || odd_negative(&sum) {
        return Err(Error::Domain(format!("Lommel parameters mu = {mu}, nu = {nu}: mu +- nu is a negative odd integer")));
    }
    let build = |p: u32| {
        let diff = Complex::with_val(p, mu.value() - nu.value());
        let sum = Complex::with_val(p, mu.value() + nu.value());
        let b1 = Complex::with_val(p, &diff + 3u32) / 2u32;
        let b2 = Complex::with_val(p, &sum + 3u32) / 2u32;
        let zz = -Complex::with_val(p, z.value().square_ref()) / 4u32;
        RawParams { num: vec![Complex::with_val(p, (1, 0))], den: vec![b1, b2], z: zz }
    };
    let raw = pfq_raw(&build, digits, &PfqOptions::default())?;
    let mu1 = Complex::with_val(prec, mu.value() + 1u32);
    let zp = if z.is_zero() {
        Complex::with_val(prec, (0, 0))
    } else {
        Complex::with_val(prec, z.value().pow(&mu1))
    };
    let pref = zp / (Complex::with_val(prec, &diff + 1u32) * Complex::with_val(prec, &sum + 1u32));
    let pabs = Float::with_val(prec, pref.abs_ref());
    let scaled = RawSeries {
        value: Complex::with_val(prec, &raw.value * &pref),
        abs_sum: Float::with_val(64, &raw.abs_sum * &pabs),
        trunc: Float::with_val(64, &raw.trunc * &pabs),
        ..raw
    };
    Ok(finish(scaled, digits))
}

/// Δ(N; λ) = {λ/N, (λ+1)/N, …, (λ+N−1)/N}.
pub fn delta_array(n: u32, lam: &PrecisionComplex) -> Result<Vec<PrecisionComplex>> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let prec = bits_for_digits(lam.digits());
    Ok((0..n)
        .map(|i| PrecisionComplex::from_complex(Complex::with_val(prec, lam.value() + i) / n, lam.digits()))
        .collect())
}

/// Δ*(N; j+1) = {(j+1)/N, …, (j+N)/N} without the element equal to 1.
pub fn delta_star_array(n: u32, j: u32, digits: u32) -> Result<Vec<PrecisionComplex>> {
    Ok(delta_star_exact(n, j)?.iter().map(|x| PrecisionComplex::from_exact(x, digits)).collect())
}

pub(crate) fn delta_star_exact(n: u32, j: u32) -> Result<Vec<ExactReal>> {
    if n == 0 || j >= n {
        return Err(Error::Range(format!("j = {j} with N = {n}")));
    }
    Ok((1..=n).filter(|i| j + i != n).map(|i| ExactReal::ratio((j + i) as i64, n as i64)).collect())
}

/// cos w as ₀F₁(; 1/2; −w²/4).
pub fn cos_via_0f1(w: &ExactReal, digits: u32) -> Result<SeriesEvaluation> {
    let z = -(w.clone() * w.clone()) / ExactReal::int(4);
    eval_pfq_exact(&[], &[ExactReal::ratio(1, 2)], &z, digits)
}

/// sin w as w · ₀F₁(; 3/2; −w²/4).
pub fn sin_via_0f1(w: &ExactReal, digits: u32) -> Result<SeriesEvaluation> {
    let z = -(w.clone() * w.clone()) / ExactReal::int(4);
    let mut s = eval_pfq_exact(&[], &[ExactReal::ratio(3, 2)], &z, digits)?;
    let wv = PrecisionComplex::from_exact(w, digits);
    let wa = wv.abs();
    s.value = &s.value * &wv;
    s.abs_sum = &s.abs_sum * &wa;
    s.trunc_error = &s.trunc_error * &wa;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn re(s: &SeriesEvaluation) -> f64 {
        s.value.value().real().to_f64()
    }

    #[test]
    fn classification_examples() {
        let p = HypergeomParams::real(&[1.0, 2.0], &[3.0, 4.0, 5.0], 1e6, 30).unwrap();
        assert_eq!(classify(&p).tag, ConvergenceTag::EntireInZ);
        let p = HypergeomParams::real(&[1.0, 2.0], &[3.0], 0.5, 30).unwrap();
        assert_eq!(classify(&p).tag, ConvergenceTag::DiskConvergent);
        let p = HypergeomParams::real(&[1.0, 1.0], &[3.0], 1.0, 30).unwrap();
        let c = classify(&p);
        assert_eq!(c.tag, ConvergenceTag::BoundaryAbsolute);
        assert_eq!(c.omega.value().real().to_f64(), 1.0);
        let p = HypergeomParams::real(&[1.0, 1.0], &[1.5], -1.0, 30).unwrap();
        assert_eq!(classify(&p).tag, ConvergenceTag::BoundaryConditional);
        let p = HypergeomParams::real(&[1.0, 1.0], &[1.5], 1.0, 30).unwrap();
        assert_eq!(classify(&p).tag, ConvergenceTag::Divergent);
        let p = HypergeomParams::real(&[1.0, 1.0, 1.0], &[], 0.1, 30).unwrap();
        assert_eq!(classify(&p).tag, ConvergenceTag::Divergent);
        let p = HypergeomParams::real(&[-3.0, 1.0, 1.0], &[], 10.0, 30).unwrap();
        assert_eq!(classify(&p).tag, ConvergenceTag::EntireInZ);
    }

    #[test]
    fn evaluation_examples() {
        let s = eval_pfq(&HypergeomParams::real(&[1.0], &[], 0.5, 50).unwrap(), 50).unwrap();
        assert!((re(&s) - 2.0).abs() < 1e-45);
        let pi = ExactReal::pi();
        let c = cos_via_0f1(&pi, 50).unwrap();
        let err = Float::with_val(200, c.value.value().real() + 1u32).abs();
        assert!(err.to_f64() < 1e-48, "{err}");
        let z = -(pi.clone() * pi.clone()) / ExactReal::int(4);
        let s = eval_pfq_exact(&[], &[ExactReal::ratio(3, 2)], &z, 50).unwrap();
        let v = Float::with_val(200, s.value.value().real() * Float::with_val(200, Constant::Pi));
        assert!(v.abs().to_f64() < 1e-48);
        let one = eval_pfq(&HypergeomParams::real(&[1.0, 2.0, 3.0], &[], 0.0, 50).unwrap(), 50).unwrap();
        assert_eq!(re(&one), 1.0);
    }

    #[test]
    fn divergence_and_pole_errors() {
        let p = HypergeomParams::real(&[1.0, 1.0], &[1.0], 2.0, 30).unwrap();
        assert!(matches!(eval_pfq(&p, 30), Err(Error::Divergent(_))));
        assert!(HypergeomParams::real(&[1.0], &[-2.0], 0.5, 30).is_err());
    }

    #[test]
    fn terminating_series_is_polynomial() {
        // ₂F₁(-3, 2; 1; z) = 1 - 6z + 9z² - 4z³
        let s = eval_pfq(&HypergeomParams::real(&[-3.0, 2.0], &[1.0], 3.0, 40).unwrap(), 40).unwrap();
        assert_eq!(re(&s), 1.0 - 18.0 + 81.0 - 108.0);
        assert!(s.trunc_error.is_zero());
    }

    #[test]
    fn boundary_absolute_sum() {
        // ₂F₁(1,1;3;1) = 2
        let opts = PfqOptions { max_terms: 200_000, ..Default::default() };
        let s = eval_pfq_with(&HypergeomParams::real(&[1.0, 1.0], &[3.0], 1.0, 20).unwrap(), 20, &opts).unwrap();
        assert!((re(&s) - 2.0).abs() < 1e-4);
        assert!(s.trunc_error.to_f64() > 0.0);
    }

    #[test]
    fn heavy_cancellation_escalates() {
        // cos(40) needs the summation to carry ~17 extra digits
        let w = ExactReal::int(40);
        let c = cos_via_0f1(&w, 50).unwrap();
        let expect = Float::with_val(300, 40).cos();
        let d = Float::with_val(300, c.value.value().real() - &expect).abs();
        assert!(d.to_f64() < 1e-49, "{d}");
        assert!(c.working_digits >= 50 + 17);
        assert!(c.cancellation_index.to_f64() > 1e16);
    }

    #[test]
    fn precision_cap_is_enforced() {
        let opts = PfqOptions { max_digits_factor: 2, max_digits_floor: 0, max_terms: 1_000_000 };
        let z = ExactReal::int(-400 * 400 / 4);
        let e = pfq_exact_raw(&[], &[ExactReal::ratio(1, 2)], &z, 30, &opts);
        assert!(matches!(e, Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn lommel_examples() {
        let c = |x: f64| PrecisionComplex::from_f64(x, 0.0, 50);
        // leading behaviour z²/4
        let s = lommel(&c(1.0), &c(0.0), &c(1e-6), 50).unwrap();
        assert!((re(&s) / 2.5e-13 - 1.0).abs() < 1e-10);
        let s = lommel(&c(1.0), &c(0.0), &c(1.0), 50).unwrap();
        let f = eval_pfq(&HypergeomParams::real(&[1.0], &[2.0, 2.0], -0.25, 50).unwrap(), 50).unwrap();
        assert!((re(&s) - re(&f) / 4.0).abs() < 1e-16);
        assert!(lommel(&c(-2.0), &c(1.0), &c(1.0), 50).is_err());
    }

    #[test]
    fn delta_arrays() {
        let d = delta_array(2, &PrecisionComplex::from_f64(1.5, 0.0, 30)).unwrap();
        let v: Vec<f64> = d.iter().map(|x| x.re().to_f64()).collect();
        assert_eq!(v, vec![0.75, 1.25]);
        let d = delta_array(1, &PrecisionComplex::from_f64(0.3, 0.0, 30)).unwrap();
        assert_eq!(d.len(), 1);
        let f = |j| -> Vec<f64> { delta_star_array(4, j, 30).unwrap().iter().map(|x| x.re().to_f64()).collect() };
        assert_eq!(f(0), vec![0.25, 0.5, 0.75]);
        assert_eq!(f(1), vec![0.5, 0.75, 1.25]);
        assert_eq!(f(3), vec![1.25, 1.5, 1.75]);
        assert!(matches!(delta_star_array(4, 4, 30), Err(Error::Range(_))));
    }
}
