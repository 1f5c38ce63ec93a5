//! Fox-Wright Ψ by its defining series, with the convergence parameters and
//! the contour-case classification.
//!
//! Terms are built in log space from log Γ, so Γ-ratios with large
//! coefficients never overflow. The contour representation is only
//! classified; the number returned is always the left-loop series.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::hypergeom::{ConvergenceClass, ConvergenceTag, SeriesEvaluation};
use crate::precision::{bits_for_digits, ln_gamma_complex, log10_abs, PrecisionComplex, PrecisionReal};
use crate::seriestools::Stopper;

#[derive(Clone, Debug)]
pub struct FoxWrightSpec {
    /// (αᵢ, Aᵢ)
    pub upper: Vec<(PrecisionComplex, f64)>,
    /// (βⱼ, Bⱼ)
    pub lower: Vec<(PrecisionComplex, f64)>,
    pub arg: PrecisionComplex,
}

impl FoxWrightSpec {
    pub fn new(upper: Vec<(PrecisionComplex, f64)>, lower: Vec<(PrecisionComplex, f64)>, arg: PrecisionComplex) -> Result<Self> {
        for (_, a) in upper.iter().chain(&lower) {
            if *a == 0.0 || !a.is_finite() {
                return Err(Error::Domain(format!("Fox-Wright coefficient {a} must be finite and nonzero")));
            }
        }
        Ok(Self { upper, lower, arg })
    }

    /// Real parameters from f64 pairs.
    pub fn real(upper: &[(f64, f64)], lower: &[(f64, f64)], z: f64, digits: u32) -> Result<Self> {
        let c = |&(x, a): &(f64, f64)| (PrecisionComplex::from_f64(x, 0.0, digits), a);
        Self::new(upper.iter().map(c).collect(), lower.iter().map(c).collect(), PrecisionComplex::from_f64(z, 0.0, digits))
    }

    fn digits(&self) -> u32 {
        self.upper.iter().chain(&self.lower).map(|(x, _)| x.digits()).chain([self.arg.digits()]).min().unwrap_or(50)
    }
}

/// The nine convergence conditions, grouped by contour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    Viii,
    Ix,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::I => "i",
            Condition::Ii => "ii",
            Condition::Iii => "iii",
            Condition::Iv => "iv",
            Condition::V => "v",
            Condition::Vi => "vi",
            Condition::Vii => "vii",
            Condition::Viii => "viii",
            Condition::Ix => "ix",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Convergent,
    Conditional,
    Divergent,
}

#[derive(Clone, Debug)]
pub struct FoxWrightConvergence {
    pub delta_star: f64,
    pub delta_small: f64,
    pub mu_star: PrecisionComplex,
    pub sigma_star: f64,
    /// Verdict for the left-loop series at the spec's argument.
    pub verdict: Verdict,
    /// The left-loop condition that admits the series, if any.
    pub series_condition: Option<Condition>,
    /// Every condition (i)–(ix) satisfied at the argument.
    pub matched: Vec<Condition>,
}

const EQ_TOL: f64 = 1e-12;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

pub fn convergence_params(spec: &FoxWrightSpec) -> FoxWrightConvergence {
    let digits = spec.digits();
    let prec = bits_for_digits(digits);
    let sum_a: f64 = spec.upper.iter().map(|(_, a)| a).sum();
    let sum_b: f64 = spec.lower.iter().map(|(_, b)| b).sum();
    let delta_star = sum_b - sum_a;
    let sigma_star = 1.0 - delta_star;
    let log_delta: f64 = spec.upper.iter().map(|(_, a)| -a * a.abs().ln()).sum::<f64>()
        + spec.lower.iter().map(|(_, b)| b * b.abs().ln()).sum::<f64>();
    let delta_small = log_delta.exp();

    let mut mu = Complex::with_val(prec, (0, 0));
    for (b, _) in &spec.lower {
        mu += b.value();
    }
    for (a, _) in &spec.upper {
        mu -= a.value();
    }
    mu += Float::with_val(prec, spec.upper.len() as i64 - spec.lower.len() as i64) / 2u32;
    let re_mu = mu.real().to_f64();

    let z = spec.arg.value();
    let zabs = Float::with_val(64, z.abs_ref()).to_f64();
    let nonzero = zabs > 0.0;
    // arg(−z)
    let minus = Complex::with_val(64, -z);
    let arg_mz = if nonzero { minus.imag().to_f64().atan2(minus.real().to_f64()) } else { 0.0 };
    let at_radius = nonzero && (zabs - delta_small).abs() <= EQ_TOL * delta_small.max(1.0);
    let dm1 = near(delta_star, -1.0);
    let s0 = near(sigma_star, 0.0);
    let gamma = 0.0;

    let mut matched = Vec::new();
    if nonzero && delta_star > -1.0 && !dm1 {
        matched.push(Condition::I);
    }
    if nonzero && dm1 && zabs < delta_small && !at_radius {
        matched.push(Condition::Ii);
    }
    if dm1 && at_radius && re_mu > 0.5 {
        matched.push(Condition::Iii);
    }
    if nonzero && delta_star < -1.0 && !dm1 {
        matched.push(Condition::Iv);
    }
    if dm1 && zabs > delta_small && !at_radius {
        matched.push(Condition::V);
    }
    if dm1 && at_radius && re_mu > 0.5 {
        matched.push(Condition::Vi);
    }
    if nonzero && sigma_star > 0.0 && !s0 && arg_mz.abs() < std::f64::consts::FRAC_PI_2 * sigma_star {
        matched.push(Condition::Vii);
    }
    let arg_zero = nonzero && arg_mz.abs() <= EQ_TOL;
    if s0 && arg_zero && -gamma * delta_star + re_mu > 0.5 + gamma {
        matched.push(Condition::Viii);
    }
    if s0 && arg_zero && re_mu > 0.5 {
        matched.push(Condition::Ix);
    }

    let (verdict, series_condition) = if !nonzero {
        (Verdict::Convergent, None)
    } else if matched.contains(&Condition::I) {
        (Verdict::Convergent, Some(Condition::I))
    } else if matched.contains(&Condition::Ii) {
        (Verdict::Convergent, Some(Condition::Ii))
    } else if matched.contains(&Condition::Iii) {
        (Verdict::Conditional, Some(Condition::Iii))
    } else {
        (Verdict::Divergent, None)
    };

    FoxWrightConvergence {
        delta_star,
        delta_small,
        mu_star: PrecisionComplex::from_complex(mu, digits),
        sigma_star,
        verdict,
        series_condition,
        matched,
    }
}

/// ln of the k-th Γ-ratio ∏Γ(αᵢ+kAᵢ)/∏Γ(βⱼ+kBⱼ), principal branch per factor.
pub(crate) fn ln_gamma_ratio(upper: &[(Complex, f64)], lower: &[(Complex, f64)], k: u64, prec: u32) -> Result<Complex> {
    let mut acc = Complex::with_val(prec, (0, 0));
    for (a, aa) in upper {
        let w = Complex::with_val(prec, a + Float::with_val(prec, *aa) * k);
        acc += ln_gamma_complex(&w, prec).map_err(|_| Error::Pole(format!("Gamma({w}) in numerator at k = {k}")))?;
    }
    for (b, bb) in lower {
        let w = Complex::with_val(prec, b + Float::with_val(prec, *bb) * k);
        acc -= ln_gamma_complex(&w, prec).map_err(|_| Error::Pole(format!("1/Gamma({w}) in denominator at k = {k}")))?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug)]
pub struct FoxWrightOptions {
    pub max_terms: u64,
    pub max_digits_factor: u32,
}

impl Default for FoxWrightOptions {
    fn default() -> Self {
        Self { max_terms: 20_000, max_digits_factor: 20 }
    }
}

struct Partial {
    value: Complex,
    abs_sum: Float,
    terms: u64,
    trunc: Float,
    peak_log10: f64,
}

fn sum_series(spec: &FoxWrightSpec, target: u32, working: u32, conditional: bool, opts: &FoxWrightOptions) -> Result<Partial> {
    let prec = bits_for_digits(working);
    let up: Vec<(Complex, f64)> = spec.upper.iter().map(|(a, aa)| (Complex::with_val(prec, a.value()), *aa)).collect();
    let lo: Vec<(Complex, f64)> = spec.lower.iter().map(|(b, bb)| (Complex::with_val(prec, b.value()), *bb)).collect();
    let z = Complex::with_val(prec, spec.arg.value());
    let zero_z = z.real().is_zero() && z.imag().is_zero();
    let lnz = if zero_z { Complex::with_val(prec, (0, 0)) } else { Complex::with_val(prec, z.ln_ref()) };
    let one = (Complex::with_val(prec, (1, 0)), 1.0);

    let mut sum = Complex::with_val(prec, (0, 0));
    let mut abs_sum = Float::with_val(64, 0);
    let mut stop = Stopper::new(target + 2, working);
    let mut prev_log = f64::NAN;
    let mut peak = f64::NEG_INFINITY;
    let mut k = 0u64;
    loop {
        let mut lower = lo.clone();
        lower.push(one.clone());
        let mut lt = ln_gamma_ratio(&up, &lower, k, prec)?;
        if k > 0 {
            lt += Complex::with_val(prec, &lnz * k);
        }
        let t = Complex::with_val(prec, lt.exp_ref());
        let ta = Float::with_val(64, t.abs_ref());
        let tl = log10_abs(&ta);
        sum += &t;
        abs_sum += &ta;
        peak = peak.max(tl);
        k += 1;
        if zero_z {
            return Ok(Partial { value: sum, abs_sum, terms: 1, trunc: Float::with_val(64, 0), peak_log10: peak });
        }
        let ratio = 10f64.powf(tl - prev_log);
        prev_log = tl;
        let small = stop.observe(tl, log10_abs(&Float::with_val(64, sum.abs_ref())), log10_abs(&abs_sum));
        if small && ratio < 1.0 {
            let trunc = if conditional { ta * k as f64 } else { ta * (ratio / (1.0 - ratio)) };
            return Ok(Partial { value: sum, abs_sum, terms: k, trunc, peak_log10: peak });
        }
        if k >= opts.max_terms {
            if conditional {
                return Ok(Partial { value: sum, abs_sum, terms: k, trunc: ta * k as f64, peak_log10: peak });
            }
            return Err(Error::NonConvergence(format!("Fox-Wright series not converged after {k} terms")));
        }
    }
}

fn check_summable(spec: &FoxWrightSpec) -> Result<FoxWrightConvergence> {
    let conv = convergence_params(spec);
    if conv.verdict == Verdict::Divergent {
        return Err(Error::Divergent(format!(
            "Fox-Wright series at |z| = {} with Delta* = {}, delta* = {} (conditions matched: {})",
            spec.arg.abs().to_f64(),
            conv.delta_star,
            conv.delta_small,
            conv.matched.iter().map(|c| c.label()).collect::<Vec<_>>().join(",")
        )));
    }
    Ok(conv)
}

pub fn eval_fox_wright(spec: &FoxWrightSpec, digits: u32) -> Result<SeriesEvaluation> {
    eval_fox_wright_with(spec, digits, &FoxWrightOptions::default())
}

pub fn eval_fox_wright_with(spec: &FoxWrightSpec, digits: u32, opts: &FoxWrightOptions) -> Result<SeriesEvaluation> {
    let conv = check_summable(spec)?;
    let conditional = conv.verdict == Verdict::Conditional;
    let cap = digits * opts.max_digits_factor.max(1);
    let mut guard = 10u32;
    let mut attempt = 0;
    let part = loop {
        let working = digits + guard;
        if working > cap {
            return Err(Error::PrecisionExhausted { needed: working, cap });
        }
        let p = sum_series(spec, digits, working, conditional, opts)?;
        let mag = log10_abs(&Float::with_val(64, p.value.abs_ref()));
        let loss = (p.peak_log10 - mag).max(log10_abs(&p.abs_sum) - mag);
        attempt += 1;
        if attempt == 2 || !loss.is_finite() || loss + 3.0 <= guard as f64 {
            break (p, working);
        }
        guard = loss.ceil() as u32 + 8;
    };
    let (p, working) = part;
    Ok(finish(p, working, digits, &conv, spec))
}

fn finish(p: Partial, working: u32, digits: u32, conv: &FoxWrightConvergence, spec: &FoxWrightSpec) -> SeriesEvaluation {
    let prec = bits_for_digits(digits);
    let mag = Float::with_val(prec, p.value.abs_ref());
    let ci = if mag.is_zero() {
        Float::with_val(prec, rug::float::Special::Infinity)
    } else {
        Float::with_val(prec, &p.abs_sum / &mag)
    };
    let tag = match conv.series_condition {
        None => ConvergenceTag::EntireInZ,
        Some(Condition::I) => ConvergenceTag::EntireInZ,
        Some(Condition::Ii) => ConvergenceTag::DiskConvergent,
        _ => ConvergenceTag::BoundaryAbsolute,
    };
    // Σβ − Σα, so unit coefficients reproduce the pFq ω
    let shift = (spec.lower.len() as i64 - spec.upper.len() as i64) as f64 / 2.0;
    let omega = Complex::with_val(prec, conv.mu_star.value() + Float::with_val(prec, shift));
    SeriesEvaluation {
        value: PrecisionComplex::from_complex(p.value, digits),
        terms_used: p.terms,
        abs_sum: PrecisionReal::from_float(p.abs_sum, digits),
        cancellation_index: PrecisionReal::from_float(ci, digits),
        trunc_error: PrecisionReal::from_float(p.trunc, digits),
        class: ConvergenceClass { tag, omega: PrecisionComplex::from_complex(omega, digits) },
        working_digits: working,
    }
}

/// Ψ* = Ψ · ∏Γ(βⱼ)/∏Γ(αᵢ).
pub fn eval_fox_wright_star(spec: &FoxWrightSpec, digits: u32) -> Result<SeriesEvaluation> {
    let mut s = eval_fox_wright(spec, digits)?;
    let prec = bits_for_digits(s.working_digits) + 16;
    let up: Vec<(Complex, f64)> = spec.upper.iter().map(|(a, _)| (Complex::with_val(prec, a.value()), 1.0)).collect();
    let lo: Vec<(Complex, f64)> = spec.lower.iter().map(|(b, _)| (Complex::with_val(prec, b.value()), 1.0)).collect();
    let norm = Complex::with_val(prec, (-ln_gamma_ratio(&up, &lo, 0, prec)?).exp_ref());
    let nabs = PrecisionReal::from_float(Float::with_val(prec, norm.abs_ref()), digits);
    s.value = PrecisionComplex::from_complex(Complex::with_val(prec, s.value.value() * &norm), digits);
    s.abs_sum = &s.abs_sum * &nabs;
    s.trunc_error = &s.trunc_error * &nabs;
    Ok(s)
}
