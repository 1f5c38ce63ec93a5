//! Fourier cosine transforms of x^(υ-1) e^(-λb√x) · (series in e^(-c√x)).
//!
//! Expanding the bracket in powers of e^(-c√x) reduces everything to
//!
//!   I = Σ_k w_k F_υ(λb + ck, y),   F_υ(a, y) = ∫₀^∞ x^(υ-1) e^(-a√x) cos(xy) dx,
//!
//! with w_k = Θ(k)/k!. F has three evaluation routes: the ℓ-series in
//! powers of a (heavy cancellation, escalated precision), the same series
//! regrouped mod 4 into four ₂F₃ pieces, and the large-a expansion
//! Σ_m C_m a^(-2υ-4m).
//!
//! The k-sum is split at K. Terms k ≤ K are summed directly. For weights
//! with a Stirling expansion (Pochhammer and Γ-ratio kernels) the tail k > K
//! is summed in closed form: the large-a expansion of F times the
//! asymptotic expansion of w_k turns Σ_{k>K} into Hurwitz zeta values. For
//! w_k ≡ 1 this is exact up to a rigorous remainder. Factorially or
//! geometrically decaying weights are simply summed until the majorant
//! 2Γ(2υ)/a^(2υ) · Σ|w_k| is negligible.

use std::fmt;
use std::sync::Arc;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::foxwright::ln_gamma_ratio;
use crate::hypergeom::{delta_star_exact, pfq_exact_raw, PfqOptions};
use crate::precision::{
    bernoulli, bits_for_digits, gamma_real, ln_gamma_real, log10_abs, ExactReal, PrecisionReal, QuarterPhase, TrigKind,
};
use crate::seriestools::{hurwitz_zeta, k_tail_bound, Neumaier, Stopper};
use crate::transforms::{fct_quadrature, fst_quadrature, QuadratureConfig, QuadratureResult};

const LN10: f64 = std::f64::consts::LN_10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerMethod {
    LSeries,
    TwoF3,
    Asymptotic,
}

impl InnerMethod {
    pub fn label(self) -> &'static str {
        match self {
            InnerMethod::LSeries => "l-series",
            InnerMethod::TwoF3 => "2f3-pieces",
            InnerMethod::Asymptotic => "large-a",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InnerValue {
    pub value: PrecisionReal,
    /// Bound on the truncation error (absolute).
    pub error_bound: PrecisionReal,
    pub terms: u64,
    /// Σ|terms| / |value| of the route that produced the value.
    pub cancellation_index: PrecisionReal,
    pub working_digits: u32,
    pub method: InnerMethod,
}

struct RawInner {
    value: Float,
    bound: Float,
    terms: u64,
    ci: f64,
    working: u32,
    method: InnerMethod,
}

impl RawInner {
    fn publish(self, digits: u32) -> InnerValue {
        InnerValue {
            value: PrecisionReal::from_float(self.value, digits),
            error_bound: PrecisionReal::from_float(self.bound, digits),
            terms: self.terms,
            cancellation_index: PrecisionReal::from_f64(self.ci, digits),
            working_digits: self.working,
            method: self.method,
        }
    }
}

fn check_inner(u: &ExactReal, a: &ExactReal, y: &ExactReal) -> Result<()> {
    if u.to_f64() <= 0.0 {
        return Err(Error::Domain(format!("upsilon = {u} must be positive")));
    }
    if a.to_f64() < 0.0 {
        return Err(Error::Domain(format!("damping a = {a} must be non-negative")));
    }
    if y.to_f64() <= 0.0 {
        return Err(Error::Domain(format!("y = {y} must be positive")));
    }
    Ok(())
}

fn ln_gamma_f64(x: f64) -> f64 {
    ln_gamma_real(&Float::with_val(64, x), 64).map(|(l, _)| l.to_f64()).unwrap_or(f64::INFINITY)
}

/// log10 of the largest ℓ-series envelope term a^ℓ Γ(υ+ℓ/2)/(y^(ℓ/2) ℓ!).
fn lseries_peak(u: f64, a: f64, y: f64) -> f64 {
    if a == 0.0 {
        return ln_gamma_f64(u) / LN10;
    }
    let lr = 2.0 * a.ln() - y.ln();
    let mut even = ln_gamma_f64(u);
    let mut odd = a.ln() + ln_gamma_f64(u + 0.5) - 0.5 * y.ln();
    let mut peak = even.max(odd);
    let mut l = 0.0;
    loop {
        let ne = even + lr + (u + l / 2.0).ln() - ((l + 1.0) * (l + 2.0)).ln();
        let no = odd + lr + (u + (l + 1.0) / 2.0).ln() - ((l + 2.0) * (l + 3.0)).ln();
        even = ne;
        odd = no;
        peak = peak.max(even).max(odd);
        l += 2.0;
        if l > 2.0 && even < peak - 50.0 && odd < peak - 50.0 {
            break;
        }
    }
    peak / LN10
}

/// log10 |F| guess used to size the first attempt; the cancellation check
/// afterwards corrects it.
fn magnitude_guess(u: f64, a: f64, y: f64) -> f64 {
    let small_a = ln_gamma_f64(u) - u * y.ln();
    let large_a = if a > 0.0 { std::f64::consts::LN_2 + ln_gamma_f64(2.0 * u) - 2.0 * u * a.ln() } else { f64::INFINITY };
    small_a.min(large_a) / LN10
}

fn lseries_at(u: &ExactReal, a: &ExactReal, y: &ExactReal, target: u32, working: u32) -> Result<(RawInner, f64)> {
    let prec = bits_for_digits(working);
    let uv = u.eval(prec);
    let av = a.eval(prec);
    let yv = y.eval(prec);
    let phase = QuarterPhase::new(&uv, prec);
    let r2 = Float::with_val(prec, av.square_ref()) / &yv;
    let half = Float::with_val(prec, 0.5);
    let mut env = [
        gamma_real(&uv, prec)?,
        Float::with_val(prec, &av * gamma_real(&Float::with_val(prec, &uv + &half), prec)?) / yv.clone().sqrt(),
    ];
    let mut sum = Float::with_val(prec, 0);
    let mut abs_sum = Float::with_val(64, 0);
    let mut peak = f64::NEG_INFINITY;
    let mut stop = Stopper::new(target + 2, working);
    let a_zero = av.is_zero();
    let mut l: u64 = 0;
    let trunc = loop {
        let e = &env[(l % 2) as usize];
        let el = log10_abs(e);
        peak = peak.max(el);
        if !phase.is_zero(l as i64, TrigKind::Cos) {
            let mut t = Float::with_val(prec, e * phase.cos(l as i64));
            if l % 2 == 1 {
                t = -t;
            }
            abs_sum += Float::with_val(64, t.abs_ref());
            sum += t;
        }
        // E_{ℓ+2} = E_ℓ · (a²/y)(υ+ℓ/2)/((ℓ+1)(ℓ+2))
        let lf = Float::with_val(prec, l) / 2u32 + &uv;
        let ratio = Float::with_val(prec, &r2 * lf) / ((l + 1) * (l + 2));
        let next = Float::with_val(prec, e * &ratio);
        env[(l % 2) as usize] = next;
        l += 1;
        if a_zero {
            break Float::with_val(64, 0);
        }
        let small = stop.observe(el, log10_abs(&sum), log10_abs(&abs_sum));
        // the two-step ratios decrease for ℓ ≥ 2, so both parity tails are
        // dominated by geometric series once the ratio is below 1
        if small && l > 2 && ratio < 1 {
            let r = Float::with_val(64, &ratio).to_f64();
            let t = Float::with_val(64, &env[0] + &env[1]);
            break t * (1.0 / (1.0 - r));
        }
        if l > 10_000_000 {
            return Err(Error::NonConvergence("l-series".into()));
        }
    };
    let scale = Float::with_val(prec, yv.ln_ref()) * &uv;
    let scale = (-scale).exp();
    let value = Float::with_val(prec, &sum * &scale);
    let abs_sum = Float::with_val(prec, abs_sum * &scale);
    let mag = log10_abs(&value);
    let ci = if value.is_zero() { f64::INFINITY } else { 10f64.powf(log10_abs(&abs_sum) - mag) };
    let loss = peak + log10_abs(&scale) - mag;
    let bound = Float::with_val(64, trunc * &scale);
    Ok((RawInner { value, bound, terms: l, ci, working, method: InnerMethod::LSeries }, loss))
}

fn lseries_exact(u: &ExactReal, a: &ExactReal, y: &ExactReal, digits: u32, cap: u32) -> Result<RawInner> {
    check_inner(u, a, y)?;
    let (uf, af, yf) = (u.to_f64(), a.to_f64(), y.to_f64());
    let est = lseries_peak(uf, af, yf) - uf * yf.log10() - magnitude_guess(uf, af, yf);
    let mut guard = est.max(0.0).ceil() as u32 + 10;
    for attempt in 0..3 {
        let working = digits + guard;
        if working > cap {
            return Err(Error::PrecisionExhausted { needed: working, cap });
        }
        let (raw, loss) = lseries_at(u, a, y, digits, working)?;
        if attempt == 2 || !loss.is_finite() || loss + 3.0 <= guard as f64 {
            return Ok(raw);
        }
        guard = loss.ceil() as u32 + 8;
    }
    unreachable!()
}

fn asymptotic_exact(u: &ExactReal, a: &ExactReal, y: &ExactReal, digits: u32) -> Result<RawInner> {
    check_inner(u, a, y)?;
    let working = digits + 10;
    let prec = bits_for_digits(working);
    let uv = u.eval(prec);
    let av = a.eval(prec);
    let yv = y.eval(prec);
    if av.is_zero() {
        return Err(Error::Domain("large-a expansion needs a > 0".into()));
    }
    let two_u = Float::with_val(prec, &uv * 2u32);
    // t_0 = 2Γ(2υ) a^(-2υ)
    let mut t = gamma_real(&two_u, prec)? * 2u32 / Float::with_val(prec, (&av).pow(&two_u));
    let a4 = Float::with_val(prec, av.square_ref()).square();
    let y2 = Float::with_val(prec, yv.square_ref());
    let mut sum = Float::with_val(prec, 0);
    let mut prev = f64::INFINITY;
    let mut m: u64 = 0;
    loop {
        let tl = log10_abs(&t);
        if tl >= prev {
            return Err(Error::NonConvergence("large-a expansion reached its smallest term before the target".into()));
        }
        if !sum.is_zero() && tl < log10_abs(&sum) - (digits as f64 + 2.0) {
            let bound = Float::with_val(64, t.abs_ref());
            let ci = 10f64.powf(log10_abs(&{
                let mut s = Float::with_val(64, 0);
                s += Float::with_val(64, sum.abs_ref());
                s
            }) - log10_abs(&sum));
            return Ok(RawInner { value: sum, bound, terms: m, ci, working, method: InnerMethod::Asymptotic });
        }
        sum += &t;
        prev = tl;
        // t_{m+1}/t_m = -y² (2υ+4m)…(2υ+4m+3) / ((2m+1)(2m+2) a⁴)
        let base = Float::with_val(prec, &two_u + 4 * m);
        let mut r = base.clone();
        for i in 1..4u32 {
            r *= Float::with_val(prec, &base + i);
        }
        r *= &y2;
        r /= Float::with_val(prec, &a4 * ((2 * m + 1) * (2 * m + 2)));
        t *= r;
        t = -t;
        m += 1;
    }
}

fn twof3_exact(u: &ExactReal, a: &ExactReal, y: &ExactReal, digits: u32, cap: u32) -> Result<RawInner> {
    check_inner(u, a, y)?;
    let z = -(a.clone().powi(4) / (ExactReal::int(64) * y.clone().powi(2)));
    let opts = PfqOptions { max_digits_factor: (cap / digits.max(1)).max(2), ..PfqOptions::default() };
    let mut piece_digits = digits + 10;
    for attempt in 0..3 {
        let prec = bits_for_digits(piece_digits + 10);
        let uv = u.eval(prec);
        let av = a.eval(prec);
        let yv = y.eval(prec);
        let phase = QuarterPhase::new(&uv, prec);
        let mut total = Float::with_val(prec, 0);
        let mut largest = f64::NEG_INFINITY;
        let mut bound = Float::with_val(64, 0);
        let mut terms = 0;
        let mut abs_sum = Float::with_val(64, 0);
        let mut working = piece_digits;
        for j in 0..4u32 {
            if phase.is_zero(j as i64, TrigKind::Cos) {
                continue;
            }
            // (−1)^j a^j Γ(υ+j/2) cos(θ+jπ/4) / (y^(j/2) j!)
            let g = gamma_real(&Float::with_val(prec, &uv + Float::with_val(prec, j) / 2u32), prec)?;
            let yj = Float::with_val(prec, (&yv).pow(Float::with_val(prec, j) / 2u32));
            let mut coef = Float::with_val(prec, (&av).pow(j)) * g * phase.cos(j as i64) / yj / [1u32, 1, 2, 6][j as usize];
            if j % 2 == 1 {
                coef = -coef;
            }
            let two_uj = ExactReal::int(2) * u.clone() + ExactReal::int(j as i64);
            let num = [two_uj.clone() / ExactReal::int(4), (two_uj + ExactReal::int(2)) / ExactReal::int(4)];
            let den = delta_star_exact(4, j)?;
            let f = pfq_exact_raw(&num, &den, &z, piece_digits, &opts)?;
            let piece = Float::with_val(prec, f.value.real() * &coef);
            largest = largest.max(log10_abs(&piece));
            let cabs = Float::with_val(64, coef.abs_ref());
            bound += Float::with_val(64, &f.trunc * &cabs);
            abs_sum += Float::with_val(64, &f.abs_sum * &cabs);
            terms += f.terms;
            working = working.max(f.working_digits);
            total += piece;
        }
        let scale = (-(Float::with_val(prec, yv.ln_ref()) * &uv)).exp();
        total *= &scale;
        let loss = largest + log10_abs(&scale) - log10_abs(&total);
        if attempt == 2 || !loss.is_finite() || loss <= 7.0 {
            let ci = 10f64.powf(log10_abs(&abs_sum) + log10_abs(&scale) - log10_abs(&total));
            let bound = Float::with_val(64, bound * &scale);
            return Ok(RawInner { value: total, bound, terms, ci, working, method: InnerMethod::TwoF3 });
        }
        piece_digits = digits + loss.ceil() as u32 + 10;
        if piece_digits > cap {
            return Err(Error::PrecisionExhausted { needed: piece_digits, cap });
        }
    }
    unreachable!()
}

/// a²/(4y) beyond which the large-a expansion reaches `digits`.
fn asymptotic_threshold(digits: u32) -> f64 {
    (digits as f64 + 10.0) * LN10
}

fn inner_exact(u: &ExactReal, a: &ExactReal, y: &ExactReal, digits: u32, cap: u32) -> Result<RawInner> {
    let (af, yf) = (a.to_f64(), y.to_f64());
    if af * af / (4.0 * yf) > asymptotic_threshold(digits) {
        if let Ok(r) = asymptotic_exact(u, a, y, digits) {
            return Ok(r);
        }
    }
    lseries_exact(u, a, y, digits, cap)
}

fn default_cap(digits: u32) -> u32 {
    (digits * 20).max(400)
}

fn ex(x: &PrecisionReal) -> ExactReal {
    ExactReal::Binary(x.value().clone())
}

/// F_υ(a, y) by the ℓ-series
/// y^(-υ) Σ_ℓ (−1)^ℓ a^ℓ Γ(υ+ℓ/2) cos(υπ/2+ℓπ/4) / (y^(ℓ/2) ℓ!).
pub fn inner_integral_series(u: &PrecisionReal, a: &PrecisionReal, y: &PrecisionReal, digits: u32) -> Result<InnerValue> {
    Ok(lseries_exact(&ex(u), &ex(a), &ex(y), digits, default_cap(digits))?.publish(digits))
}

/// F_υ(a, y) as four ₂F₃ pieces at argument −a⁴/(64y²).
pub fn inner_integral_2f3(u: &PrecisionReal, a: &PrecisionReal, y: &PrecisionReal, digits: u32) -> Result<InnerValue> {
    Ok(twof3_exact(&ex(u), &ex(a), &ex(y), digits, default_cap(digits))?.publish(digits))
}

/// F_υ(a, y) by Σ_m C_m a^(-2υ-4m), C_m = 2(−1)^m y^(2m) Γ(2υ+4m)/(2m)!.
/// Fails when the smallest term is above the requested accuracy.
pub fn inner_integral_asymptotic(u: &PrecisionReal, a: &PrecisionReal, y: &PrecisionReal, digits: u32) -> Result<InnerValue> {
    Ok(asymptotic_exact(&ex(u), &ex(a), &ex(y), digits)?.publish(digits))
}

/// F_υ(a, y) by whichever route is cheapest at this a.
pub fn inner_integral(u: &PrecisionReal, a: &PrecisionReal, y: &PrecisionReal, digits: u32) -> Result<InnerValue> {
    Ok(inner_exact(&ex(u), &ex(a), &ex(y), digits, default_cap(digits))?.publish(digits))
}

/// Exact-input variants for callers that carry symbolic parameters.
pub fn inner_integral_exact(u: &ExactReal, a: &ExactReal, y: &ExactReal, digits: u32) -> Result<InnerValue> {
    Ok(inner_exact(u, a, y, digits, default_cap(digits))?.publish(digits))
}

pub fn inner_integral_2f3_exact(u: &ExactReal, a: &ExactReal, y: &ExactReal, digits: u32) -> Result<InnerValue> {
    Ok(twof3_exact(u, a, y, digits, default_cap(digits))?.publish(digits))
}

pub fn inner_integral_series_exact(u: &ExactReal, a: &ExactReal, y: &ExactReal, digits: u32) -> Result<InnerValue> {
    Ok(lseries_exact(u, a, y, digits, default_cap(digits))?.publish(digits))
}

pub type ThetaFn = Arc<dyn Fn(u64) -> ExactReal + Send + Sync>;

/// The sequence Θ(k) multiplying e^(-ck√x)/k!.
#[derive(Clone)]
pub enum Theta {
    /// Any sequence with |Θ(k)| ≤ bound.
    Bounded { f: ThetaFn, bound: f64 },
    /// Θ(k) = (λ₀)_k.
    Pochhammer(ExactReal),
    /// Θ(k) = ∏(αᵢ)_k / ∏(βⱼ)_k.
    PochhammerRatio { num: Vec<ExactReal>, den: Vec<ExactReal> },
    /// Θ(k) = ∏Γ(αᵢ+kAᵢ) / ∏Γ(βⱼ+kBⱼ).
    GammaRatio { upper: Vec<(ExactReal, f64)>, lower: Vec<(ExactReal, f64)> },
}

impl fmt::Debug for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theta::Bounded { bound, .. } => write!(f, "Bounded(|theta| <= {bound})"),
            Theta::Pochhammer(l) => write!(f, "Pochhammer({l})"),
            Theta::PochhammerRatio { num, den } => write!(f, "PochhammerRatio({num:?}; {den:?})"),
            Theta::GammaRatio { upper, lower } => write!(f, "GammaRatio({upper:?}; {lower:?})"),
        }
    }
}

impl Theta {
    pub fn bounded(bound: f64, f: impl Fn(u64) -> ExactReal + Send + Sync + 'static) -> Self {
        Theta::Bounded { f: Arc::new(f), bound }
    }

    /// Θ(0) = 1, Θ(k ≥ 1) = 0.
    pub fn single() -> Self {
        Self::bounded(1.0, |k| ExactReal::int((k == 0) as i64))
    }
}

#[derive(Clone, Debug)]
pub struct IntegralSpec {
    pub upsilon: ExactReal,
    pub b: ExactReal,
    pub c: ExactReal,
    pub lam: ExactReal,
    pub y: ExactReal,
    pub theta: Theta,
}

impl IntegralSpec {
    pub fn new(upsilon: ExactReal, b: ExactReal, c: ExactReal, lam: ExactReal, y: ExactReal, theta: Theta) -> Result<Self> {
        if upsilon.to_f64() <= 0.0 {
            return Err(Error::Domain(format!("upsilon = {upsilon} must be positive")));
        }
        if c.to_f64() <= 0.0 {
            return Err(Error::Domain(format!("c = {c} must be positive")));
        }
        if y.to_f64() <= 0.0 {
            return Err(Error::Domain(format!("y = {y} must be positive")));
        }
        // with c > 0, λb + ck > 0 for every k exactly when λb > 0
        if (lam.clone() * b.clone()).to_f64() <= 0.0 {
            return Err(Error::Domain(format!("damping lambda*b = {} must be positive", lam.clone() * b.clone())));
        }
        if let Theta::Bounded { bound, .. } = &theta {
            if !bound.is_finite() || *bound < 0.0 {
                return Err(Error::Domain("theta bound must be finite".into()));
            }
        }
        Ok(Self { upsilon, b, c, lam, y, theta })
    }

    fn damping(&self, k: u64) -> ExactReal {
        self.lam.clone() * self.b.clone() + self.c.clone() * ExactReal::int(k as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KChoice {
    /// Split the k-sum where the closed-form tail (or the majorant) reaches
    /// the working accuracy.
    Auto,
    /// Sum k ≤ K directly and report the majorant of the rest; no tail is
    /// added.
    Fixed(u64),
}

#[derive(Clone, Copy, Debug)]
pub struct RamanujanOptions {
    pub digits: u32,
    pub tolerance: f64,
    pub k: KChoice,
    /// Evaluate every ℓ-series term a second time through the ₂F₃ pieces.
    pub verify_dual: bool,
}

impl Default for RamanujanOptions {
    fn default() -> Self {
        Self { digits: 50, tolerance: 1e-12, k: KChoice::Auto, verify_dual: false }
    }
}

impl RamanujanOptions {
    pub fn with_digits(digits: u32) -> Self {
        Self { digits, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailMethod {
    /// Θ vanishes beyond the summed range.
    None,
    /// Large-a expansion times the weight's Stirling expansion, summed with
    /// Hurwitz zeta. The bound is rigorous when w_k ≡ 1.
    ClosedForm,
    /// Terms summed until the majorant dropped below tolerance.
    Majorant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Series(InnerMethod),
    Quadrature,
}

impl Method {
    pub fn label(self) -> String {
        match self {
            Method::Series(m) => format!("series({})", m.label()),
            Method::Quadrature => "quadrature".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RamanujanResult {
    pub value: PrecisionReal,
    /// Number of directly summed k terms (k = 0..K).
    pub k_terms: u64,
    pub tail_bound: PrecisionReal,
    /// Closed-form contribution of k > K (0 unless the tail method is
    /// ClosedForm).
    pub tail_value: PrecisionReal,
    pub tail_method: TailMethod,
    pub per_k_cancellation_max: PrecisionReal,
    pub method: Method,
    /// max_k |ℓ-series − ₂F₃ pieces| when verify_dual was set.
    pub dual_path_max: Option<PrecisionReal>,
    /// Σ_k over the directly summed terms of |w_k F_k| / |Σ w_k F_k|.
    pub k_cancellation: PrecisionReal,
}

/// Large-k expansion of a Γ-ratio weight
/// w_k = N · ∏Γ(A u + hᵢ)^(sᵢ) with u = k + κ, as
/// N e^const u^ρ Σ_j e_j u^(-j).
#[derive(Clone, Debug)]
struct Stirling {
    /// (A, α, s): Γ(α + kA)^s, k! included as (1, 1, −1).
    factors: Vec<(f64, ExactReal, i32)>,
    /// Γ-arguments of the k-independent normalization: Γ(x)^s.
    norm: Vec<(ExactReal, i32)>,
}

#[derive(Clone, Debug)]
enum TailModel {
    Finite(u64),
    Bounded(f64),
    Decaying,
    Stirling(Stirling),
}

fn is_nonpositive_int(x: &ExactReal) -> Option<u64> {
    let i = x.as_integer()?;
    if i <= 0 {
        (-i).to_u64()
    } else {
        None
    }
}

fn tail_model(theta: &Theta) -> Result<TailModel> {
    match theta {
        Theta::Bounded { bound, .. } => Ok(TailModel::Bounded(*bound)),
        Theta::Pochhammer(l) => tail_model(&Theta::PochhammerRatio { num: vec![l.clone()], den: vec![] }),
        Theta::PochhammerRatio { num, den } => {
            if let Some(b) = den.iter().find(|b| is_nonpositive_int(b).is_some()) {
                return Err(Error::Pole(format!("denominator parameter {b}")));
            }
            if let Some(n) = num.iter().filter_map(is_nonpositive_int).min() {
                return Ok(TailModel::Finite(n));
            }
            if num.len() > den.len() + 1 {
                return Err(Error::Domain(format!(
                    "the {}F{} kernel needs r <= s + 1 (its weights grow factorially)",
                    num.len(),
                    den.len()
                )));
            }
            if num.len() <= den.len() {
                return Ok(TailModel::Decaying);
            }
            let mut factors: Vec<(f64, ExactReal, i32)> = num.iter().map(|a| (1.0, a.clone(), 1)).collect();
            factors.extend(den.iter().map(|b| (1.0, b.clone(), -1)));
            factors.push((1.0, ExactReal::int(1), -1));
            let mut norm: Vec<(ExactReal, i32)> = num.iter().map(|a| (a.clone(), -1)).collect();
            norm.extend(den.iter().map(|b| (b.clone(), 1)));
            Ok(TailModel::Stirling(Stirling { factors, norm }))
        }
        Theta::GammaRatio { upper, lower } => {
            for (_, a) in upper.iter().chain(lower) {
                if *a == 0.0 || !a.is_finite() {
                    return Err(Error::Domain("Fox-Wright coefficients must be finite and nonzero".into()));
                }
            }
            let sa: f64 = upper.iter().map(|p| p.1).sum();
            let sb: f64 = lower.iter().map(|p| p.1).sum();
            let delta = sb - sa;
            let ln_small: f64 = upper.iter().map(|(_, a)| -a * a.abs().ln()).sum::<f64>()
                + lower.iter().map(|(_, b)| b * b.abs().ln()).sum::<f64>();
            let tol = 1e-12;
            if delta > -1.0 + tol {
                return Ok(TailModel::Decaying);
            }
            if delta < -1.0 - tol {
                return Err(Error::Domain(format!(
                    "Fox-Wright kernel with Delta* = {delta} < -1: the Gamma ratio outgrows the e^(-ck sqrt x) damping"
                )));
            }
            if ln_small > tol {
                return Ok(TailModel::Decaying);
            }
            if ln_small < -tol {
                return Err(Error::Domain(format!(
                    "Fox-Wright kernel with Delta* = -1 and delta* = {} < 1: weights grow geometrically",
                    ln_small.exp()
                )));
            }
            if upper.iter().chain(lower).any(|p| p.1 < 0.0) {
                return Err(Error::Unsupported("boundary Fox-Wright kernel with negative coefficients".into()));
            }
            let mut factors: Vec<(f64, ExactReal, i32)> = upper.iter().map(|(a, aa)| (*aa, a.clone(), 1)).collect();
            factors.extend(lower.iter().map(|(b, bb)| (*bb, b.clone(), -1)));
            factors.push((1.0, ExactReal::int(1), -1));
            Ok(TailModel::Stirling(Stirling { factors, norm: vec![] }))
        }
    }
}

/// w_k = Θ(k)/k! for k < count.
fn weights(theta: &Theta, count: u64, prec: u32) -> Result<Vec<Float>> {
    let mut out = Vec::with_capacity(count as usize);
    match theta {
        Theta::Bounded { f, .. } => {
            let mut fact = Float::with_val(prec, 1);
            for k in 0..count {
                if k > 0 {
                    fact *= k;
                }
                out.push(Float::with_val(prec, f(k).eval(prec) / &fact));
            }
        }
        Theta::Pochhammer(l) => return weights(&Theta::PochhammerRatio { num: vec![l.clone()], den: vec![] }, count, prec),
        Theta::PochhammerRatio { num, den } => {
            let nv: Vec<Float> = num.iter().map(|a| a.eval(prec)).collect();
            let dv: Vec<Float> = den.iter().map(|b| b.eval(prec)).collect();
            let mut w = Float::with_val(prec, 1);
            for k in 0..count {
                out.push(w.clone());
                for a in &nv {
                    w *= Float::with_val(prec, a + k);
                }
                for b in &dv {
                    w /= Float::with_val(prec, b + k);
                }
                w /= k + 1;
            }
        }
        Theta::GammaRatio { upper, lower } => {
            let up: Vec<(Complex, f64)> = upper.iter().map(|(a, aa)| (Complex::with_val(prec, (a.eval(prec), 0)), *aa)).collect();
            let mut lo: Vec<(Complex, f64)> = lower.iter().map(|(b, bb)| (Complex::with_val(prec, (b.eval(prec), 0)), *bb)).collect();
            lo.push((Complex::with_val(prec, (1, 0)), 1.0));
            for k in 0..count {
                let lw = match ln_gamma_ratio(&up, &lo, k, prec) {
                    Ok(v) => v,
                    // 1/Γ at a pole is zero
                    Err(Error::Pole(msg)) if msg.starts_with("1/Gamma") => {
                        out.push(Float::with_val(prec, 0));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                out.push(Complex::with_val(prec, lw.exp_ref()).real().clone());
            }
        }
    }
    Ok(out)
}

fn bernoulli_poly(n: usize, h: &Float, bern: &[Float], prec: u32) -> Float {
    let mut acc = Float::with_val(prec, 0);
    let mut binom = Float::with_val(prec, 1);
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as u32;
            binom /= k as u32;
        }
        let term = Float::with_val(prec, &binom * &bern[k]) * Float::with_val(prec, h.pow_ref_i(n - k));
        acc += term;
    }
    acc
}

trait PowI {
    fn pow_ref_i(&self, n: usize) -> Float;
}

impl PowI for Float {
    fn pow_ref_i(&self, n: usize) -> Float {
        Float::with_val(self.prec(), self.pow(n as u32))
    }
}

struct TailSum {
    value: Float,
    bound: Float,
}

enum TailError {
    NeedLargerK,
    Hard(Error),
}

impl From<Error> for TailError {
    fn from(e: Error) -> Self {
        TailError::Hard(e)
    }
}

/// Σ_{k>K} w_k F(c(k+κ)) from the expansions of F and w.
fn stirling_tail(spec: &IntegralSpec, st: &Stirling, kk: u64, digits: u32) -> std::result::Result<TailSum, TailError> {
    let prec = bits_for_digits(digits + 20);
    let u = spec.upsilon.eval(prec);
    let c = spec.c.eval(prec);
    let y = spec.y.eval(prec);
    let kappa = Float::with_val(prec, (spec.lam.clone() * spec.b.clone()).eval(prec) / &c);
    let q = Float::with_val(prec, &kappa + (kk + 1));
    let eps_log = -(digits as f64 + 8.0);
    let half = Float::with_val(prec, 0.5);
    let ln2pi = Float::with_val(prec, Float::with_val(prec, Constant::Pi) * 2u32).ln();

    // hᵢ = αᵢ − Aᵢκ; ρ and the constant of the expansion
    let mut rho = Float::with_val(prec, 0);
    let mut konst = Float::with_val(prec, 0);
    let mut sign = 1i32;
    let mut hs = Vec::new();
    for (aa, alpha, s) in &st.factors {
        let a = Float::with_val(prec, *aa);
        let h = Float::with_val(prec, alpha.eval(prec) - Float::with_val(prec, &a * &kappa));
        let hm = Float::with_val(prec, &h - &half);
        let term = Float::with_val(prec, &hm * Float::with_val(prec, a.ln_ref())) + Float::with_val(prec, &ln2pi / 2u32);
        if *s > 0 {
            rho += &hm;
            konst += term;
        } else {
            rho -= &hm;
            konst -= term;
        }
        if Float::with_val(64, &a * &q) < 1.0 {
            return Err(TailError::NeedLargerK);
        }
        hs.push((a, h, *s));
    }
    for (x, s) in &st.norm {
        let (lg, sg) = ln_gamma_real(&x.eval(prec), prec)?;
        if *s > 0 {
            konst += lg;
        } else {
            konst -= lg;
        }
        if sg < 0 {
            sign = -sign;
        }
    }
    let two_u = Float::with_val(prec, &u * 2u32);
    let s0 = Float::with_val(prec, &two_u - &rho);
    if s0 <= 1 {
        return Err(TailError::Hard(Error::Divergent(format!(
            "k-sum diverges: 2*upsilon - rho = {} <= 1",
            s0.to_f64()
        ))));
    }

    // d_n and e_j
    let jmax = 160usize;
    let trivial = hs.iter().all(|(_, h, _)| h.is_zero()) && st.factors.len() == 2 && {
        let (a0, h0, s0_) = (&hs[0].0, &hs[0].1, hs[0].2);
        let (a1, h1, s1) = (&hs[1].0, &hs[1].1, hs[1].2);
        a0 == a1 && h0 == h1 && s0_ == -s1
    };
    let same_pairs = cancels(&hs);
    let mut e = vec![Float::with_val(prec, 1)];
    let mut jstop = 1usize;
    if !(trivial || same_pairs) {
        let bern: Vec<Float> = (0..=jmax + 1).map(|n| bernoulli(n as u32, prec)).collect();
        let mut d = vec![Float::with_val(prec, 0)];
        for n in 1..=jmax {
            let mut dn = Float::with_val(prec, 0);
            for (a, h, s) in &hs {
                let bp = bernoulli_poly(n + 1, h, &bern, prec);
                let mut t = bp / Float::with_val(prec, (n * (n + 1)) as u32) / Float::with_val(prec, a.pow_ref_i(n));
                if n % 2 == 0 {
                    t = -t;
                }
                if *s < 0 {
                    t = -t;
                }
                dn += t;
            }
            d.push(dn);
        }
        let ql = log10_abs(&q);
        let mut prev = f64::INFINITY;
        let mut done = false;
        for j in 1..=jmax {
            let mut ej = Float::with_val(prec, 0);
            for n in 1..=j {
                ej += Float::with_val(prec, &d[n] * &e[j - n]) * (n as u32);
            }
            ej /= j as u32;
            let size = log10_abs(&ej) - j as f64 * ql;
            e.push(ej);
            if size < eps_log && j > 2 {
                jstop = j;
                done = true;
                break;
            }
            if size > prev + 0.5 && j > 8 {
                break;
            }
            prev = prev.min(size);
        }
        if !done {
            return Err(TailError::NeedLargerK);
        }
    }

    // C'_m = 2(−1)^m y^(2m) Γ(2υ+4m)/(2m)! · c^(−2υ−4m)
    let cq = Float::with_val(prec, &c * &q);
    let mut cm = vec![gamma_real(&two_u, prec)? * 2u32 / Float::with_val(prec, (&c).pow(&two_u))];
    let ratio_base = Float::with_val(prec, y.square_ref()) / Float::with_val(prec, c.square_ref()).square();
    let c0 = log10_abs(&cm[0]);
    let cql = log10_abs(&cq);
    let mut mstop = None;
    let mut prev = f64::INFINITY;
    for m in 0..400u64 {
        let size = log10_abs(&cm[m as usize]) - 4.0 * m as f64 * (cql - log10_abs(&c)) - c0;
        if m > 0 && size < eps_log {
            mstop = Some(m as usize);
            break;
        }
        if size > prev {
            break;
        }
        prev = size;
        let base = Float::with_val(prec, &two_u + 4 * m);
        let mut r = base.clone();
        for i in 1..4u32 {
            r *= Float::with_val(prec, &base + i);
        }
        r *= &ratio_base;
        r /= (2 * m + 1) * (2 * m + 2);
        let next = -Float::with_val(prec, &cm[m as usize] * r);
        cm.push(next);
    }
    let Some(mstop) = mstop else {
        return Err(TailError::NeedLargerK);
    };

    // Σ_t g_t ζ(s0 + t, q), g_t = Σ_{4m+j=t} C'_m e_j
    let tmax = 4 * (mstop - 1) + jstop - 1;
    let mut value = Float::with_val(prec, 0);
    let mut bound = Float::with_val(64, 0);
    for t in 0..=tmax {
        let mut g = Float::with_val(prec, 0);
        for m in 0..mstop {
            if 4 * m > t {
                break;
            }
            let j = t - 4 * m;
            if j < jstop {
                g += Float::with_val(prec, &cm[m] * &e[j]);
            }
        }
        if g.is_zero() {
            continue;
        }
        let s = Float::with_val(prec, &s0 + t as u32);
        let (z, zb) = hurwitz_zeta(&s, &q, prec)?;
        bound += Float::with_val(64, &zb * Float::with_val(64, g.abs_ref()));
        value += g * z;
    }
    // first omitted terms in m and in j
    let w_env: f64 = e.iter().enumerate().map(|(j, ej)| ej.to_f64().abs() * q.to_f64().powi(-(j as i32))).sum::<f64>().max(1.0);
    let (zm, _) = hurwitz_zeta(&Float::with_val(prec, &s0 + (4 * mstop) as u32), &q, prec)?;
    bound += Float::with_val(64, cm[mstop].abs_ref()) * zm.to_f64() * w_env;
    if jstop > 1 || !(trivial || same_pairs) {
        // each m carries its own a^(-4m) decay
        let mut omitted = Float::with_val(64, 0);
        for (m, cmv) in cm.iter().take(mstop).enumerate() {
            let (zj, _) = hurwitz_zeta(&Float::with_val(prec, &s0 + (4 * m + jstop) as u32), &q, prec)?;
            omitted += Float::with_val(64, cmv.abs_ref()) * zj.to_f64();
        }
        bound += Float::with_val(64, e[jstop].abs_ref()) * omitted * 2.0;
    }
    let scale = konst.exp();
    let mut value = value * &scale;
    if sign < 0 {
        value = -value;
    }
    let bound = bound * scale.to_f64();
    Ok(TailSum { value, bound })
}

/// True when the Γ factors cancel pairwise (same A and h, opposite sign),
/// so the weight is exactly constant in k.
fn cancels(hs: &[(Float, Float, i32)]) -> bool {
    let mut used = vec![false; hs.len()];
    for i in 0..hs.len() {
        if used[i] {
            continue;
        }
        let mut found = false;
        for j in i + 1..hs.len() {
            if !used[j] && hs[i].0 == hs[j].0 && hs[i].1 == hs[j].1 && hs[i].2 == -hs[j].2 {
                used[i] = true;
                used[j] = true;
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

/// 2Γ(2υ) Σ_{k>K} |w_k| a_k^(-2υ) estimated from the Stirling leading term
/// (exact when w ≡ 1).
fn stirling_majorant(spec: &IntegralSpec, st: &Stirling, kk: u64, digits: u32) -> Result<Float> {
    let prec = bits_for_digits(digits) + 16;
    let u = spec.upsilon.eval(prec);
    let c = spec.c.eval(prec);
    let kappa = Float::with_val(prec, (spec.lam.clone() * spec.b.clone()).eval(prec) / &c);
    let q = Float::with_val(prec, &kappa + (kk + 1));
    let half = Float::with_val(prec, 0.5);
    let ln2pi = Float::with_val(prec, Float::with_val(prec, Constant::Pi) * 2u32).ln();
    let mut rho = Float::with_val(prec, 0);
    let mut konst = Float::with_val(prec, 0);
    let mut hs = Vec::new();
    for (aa, alpha, s) in &st.factors {
        let a = Float::with_val(prec, *aa);
        let h = Float::with_val(prec, alpha.eval(prec) - Float::with_val(prec, &a * &kappa));
        let hm = Float::with_val(prec, &h - &half);
        let term = Float::with_val(prec, &hm * Float::with_val(prec, a.ln_ref())) + Float::with_val(prec, &ln2pi / 2u32);
        if *s > 0 {
            rho += &hm;
            konst += term;
        } else {
            rho -= &hm;
            konst -= term;
        }
        hs.push((a, h, *s));
    }
    for (x, s) in &st.norm {
        let (lg, _) = ln_gamma_real(&x.eval(prec), prec)?;
        if *s > 0 {
            konst += lg;
        } else {
            konst -= lg;
        }
    }
    let two_u = Float::with_val(prec, &u * 2u32);
    let s0 = Float::with_val(prec, &two_u - &rho);
    if s0 <= 1 {
        return Ok(Float::with_val(prec, rug::float::Special::Infinity));
    }
    // a little slack for the neglected 1/u corrections
    let slack = if cancels(&hs) { 1.0 } else { 1.0 + 4.0 / q.to_f64() };
    let (z, zb) = hurwitz_zeta(&s0, &q, prec)?;
    let g = gamma_real(&two_u, prec)? * 2u32 / Float::with_val(prec, (&c).pow(&two_u));
    Ok(g * (z + zb) * konst.exp() * slack)
}

/// Tail majorant 2Γ(2υ) a_{K+1}^(-2υ) |w_{K+1}| / (1 − r) for weights whose
/// successive ratio r = |w_{K+2}/w_{K+1}| keeps decreasing.
fn decaying_majorant(spec: &IntegralSpec, w1: &Float, w2: &Float, kk: u64, prec: u32) -> Result<Option<Float>> {
    if w1.is_zero() {
        return Ok(if w2.is_zero() { Some(Float::with_val(prec, 0)) } else { None });
    }
    let r = Float::with_val(prec, w2 / w1).abs();
    if r >= 0.95 {
        return Ok(None);
    }
    let u = spec.upsilon.eval(prec);
    let two_u = Float::with_val(prec, &u * 2u32);
    let a = spec.damping(kk + 1).eval(prec);
    let g = gamma_real(&two_u, prec)? * 2u32 / Float::with_val(prec, (&a).pow(&two_u));
    let one_minus = Float::with_val(prec, 1 - r);
    Ok(Some(g * Float::with_val(prec, w1.abs_ref()) / one_minus))
}

struct DirectSum {
    value: Float,
    abs: Float,
    err: Float,
    ci_max: f64,
    dual_max: Option<Float>,
    methods: Vec<InnerMethod>,
}

fn direct_sum(spec: &IntegralSpec, w: &[Float], digits: u32, verify_dual: bool) -> Result<DirectSum> {
    let prec = bits_for_digits(digits + 10);
    let cap = default_cap(digits);
    let mut value = Neumaier::new(prec);
    let mut abs = Float::with_val(64, 0);
    let mut err = Float::with_val(64, 0);
    let mut ci_max = 1f64;
    let mut dual_max: Option<Float> = None;
    let mut methods = Vec::new();
    for (k, wk) in w.iter().enumerate() {
        if wk.is_zero() {
            continue;
        }
        let a = spec.damping(k as u64);
        let f = inner_exact(&spec.upsilon, &a, &spec.y, digits, cap)?;
        if verify_dual && f.method == InnerMethod::LSeries {
            let g = twof3_exact(&spec.upsilon, &a, &spec.y, digits, cap)?;
            let d = Float::with_val(prec, &f.value - &g.value).abs();
            dual_max = Some(match dual_max {
                Some(m) if m >= d => m,
                _ => d,
            });
        }
        if f.method == InnerMethod::LSeries {
            ci_max = ci_max.max(f.ci);
        }
        if !methods.contains(&f.method) {
            methods.push(f.method);
        }
        let t = Float::with_val(prec, &f.value * wk);
        let wa = Float::with_val(64, wk.abs_ref());
        abs += Float::with_val(64, t.abs_ref());
        // relative rounding of F at `digits` plus its truncation bound
        err += Float::with_val(64, &f.bound * &wa) + Float::with_val(64, t.abs_ref()) * 10f64.powi(-(digits as i32));
        value.add(&t);
    }
    Ok(DirectSum { value: value.value(), abs, err, ci_max, dual_max, methods })
}

fn sum_spec(spec: &IntegralSpec, opts: &RamanujanOptions) -> Result<RamanujanResult> {
    let model = tail_model(&spec.theta)?;
    let digits = opts.digits;
    let inner_digits = digits + 5;
    let prec = bits_for_digits(inner_digits + 10);
    let tol = opts.tolerance;

    let (kk, tail_value, tail_bound, tail_method) = match (&model, opts.k) {
        (TailModel::Finite(n), KChoice::Auto) => (*n, Float::with_val(prec, 0), Float::with_val(prec, 0), TailMethod::None),
        (TailModel::Finite(n), KChoice::Fixed(k)) if k >= *n => {
            (k, Float::with_val(prec, 0), Float::with_val(prec, 0), TailMethod::None)
        }
        (TailModel::Stirling(st), KChoice::Auto) => {
            let (k, t) = auto_split(spec, st, inner_digits)?;
            (k, t.value, t.bound, TailMethod::ClosedForm)
        }
        (TailModel::Stirling(st), KChoice::Fixed(k)) => {
            (k, Float::with_val(prec, 0), stirling_majorant(spec, st, k, digits)?, TailMethod::Majorant)
        }
        (_, KChoice::Fixed(k)) => {
            let w = weights(&spec.theta, k + 3, prec)?;
            let b = fixed_majorant(spec, &model, &w, k, prec)?;
            (k, Float::with_val(prec, 0), b, TailMethod::Majorant)
        }
        (_, KChoice::Auto) => {
            let mut k = 4u64;
            loop {
                let w = weights(&spec.theta, k + 3, prec)?;
                let b = fixed_majorant(spec, &model, &w, k, prec)?;
                if b.is_finite() && b.to_f64() < tol * 1e-3 {
                    break (k, Float::with_val(prec, 0), b, TailMethod::Majorant);
                }
                k = k + k / 2 + 2;
                if k > 100_000 {
                    return Err(Error::NonConvergence("k-sum majorant did not reach the tolerance".into()));
                }
            }
        }
    };

    let w = weights(&spec.theta, kk + 1, prec)?;
    let mut direct = direct_sum(spec, &w, inner_digits, opts.verify_dual)?;
    // strong cancellation across k: recompute the terms with more digits
    let total = Float::with_val(prec, &direct.value + &tail_value);
    let k_ci = if total.is_zero() { f64::INFINITY } else { 10f64.powf(log10_abs(&direct.abs) - log10_abs(&total)) };
    if k_ci > 1e4 && k_ci.is_finite() {
        let extra = k_ci.log10().ceil() as u32 + 5;
        direct = direct_sum(spec, &w, inner_digits + extra, opts.verify_dual)?;
    }
    let total = Float::with_val(prec, &direct.value + &tail_value);
    let k_ci = if total.is_zero() { f64::INFINITY } else { 10f64.powf(log10_abs(&direct.abs) - log10_abs(&total)) };
    let method = if direct.methods.contains(&InnerMethod::LSeries) || direct.methods.is_empty() {
        Method::Series(InnerMethod::LSeries)
    } else {
        Method::Series(InnerMethod::Asymptotic)
    };
    let bound = Float::with_val(prec, &tail_bound + &direct.err);
    Ok(RamanujanResult {
        value: PrecisionReal::from_float(total, digits),
        k_terms: kk + 1,
        tail_bound: PrecisionReal::from_float(bound, digits),
        tail_value: PrecisionReal::from_float(tail_value, digits),
        tail_method,
        per_k_cancellation_max: PrecisionReal::from_f64(direct.ci_max, digits),
        method,
        dual_path_max: direct.dual_max.map(|d| PrecisionReal::from_float(d, digits)),
        k_cancellation: PrecisionReal::from_f64(k_ci, digits),
    })
}

/// Smallest K from which the large-a expansion reaches `digits` at every
/// k > K, grown until the weight expansion converges as well.
fn auto_split(spec: &IntegralSpec, st: &Stirling, digits: u32) -> Result<(u64, TailSum)> {
    let (c, y) = (spec.c.to_f64(), spec.y.to_f64());
    let kappa = (spec.lam.clone() * spec.b.clone()).to_f64() / c;
    let a_need = (4.0 * y * asymptotic_threshold(digits)).sqrt();
    let mut k = ((a_need / c - kappa - 1.0).ceil().max(0.0)) as u64;
    loop {
        match stirling_tail(spec, st, k, digits) {
            Ok(t) => return Ok((k, t)),
            Err(TailError::NeedLargerK) => {
                k = k + k / 4 + 4;
                if k > 20_000 {
                    return Err(Error::NonConvergence("no usable split of the k-sum".into()));
                }
            }
            Err(TailError::Hard(e)) => return Err(e),
        }
    }
}

/// Split point K, Σ_{k>K} F_υ(a₀+ck, y) and its error bound, for unit
/// weights.
pub(crate) fn unit_weight_tail(
    upsilon: &ExactReal,
    a0: &ExactReal,
    c: &ExactReal,
    y: &ExactReal,
    digits: u32,
) -> Result<(u64, Float, Float)> {
    let spec = IntegralSpec::new(upsilon.clone(), a0.clone(), c.clone(), ExactReal::int(1), y.clone(), Theta::Pochhammer(ExactReal::int(1)))?;
    let TailModel::Stirling(st) = tail_model(&spec.theta)? else { unreachable!() };
    let (k, t) = auto_split(&spec, &st, digits)?;
    Ok((k, t.value, t.bound))
}

fn fixed_majorant(spec: &IntegralSpec, model: &TailModel, w: &[Float], k: u64, prec: u32) -> Result<Float> {
    let digits = crate::precision::digits_for_bits(prec);
    match model {
        TailModel::Bounded(b) => {
            // sup_{j>K} |Θ(j)|/j! ≤ B/(K+1)!
            let fact = Float::with_val(prec, Float::factorial((k + 1) as u32));
            let theta = PrecisionReal::from_float(Float::with_val(prec, *b) / fact, digits);
            let r = |x: &ExactReal| PrecisionReal::from_float(x.eval(prec), digits);
            Ok(k_tail_bound(&r(&spec.upsilon), &r(&spec.b), &r(&spec.c), &r(&spec.lam), &theta, k)?.into_float())
        }
        TailModel::Finite(n) => {
            if k >= *n {
                Ok(Float::with_val(prec, 0))
            } else {
                fixed_majorant(spec, &TailModel::Decaying, w, k, prec)
            }
        }
        _ => {
            let i = (k + 1) as usize;
            Ok(decaying_majorant(spec, &w[i], &w[i + 1], k, prec)?
                .unwrap_or_else(|| Float::with_val(prec, rug::float::Special::Infinity)))
        }
    }
}

/// Σ_k Θ(k)/k! · F_υ(λb+ck, y).
pub fn istar_c(spec: &IntegralSpec, opts: &RamanujanOptions) -> Result<RamanujanResult> {
    sum_spec(spec, opts)
}

/// istar_c with Θ(k) = ∏Γ(αᵢ+kAᵢ)/∏Γ(βⱼ+kBⱼ).
pub fn j_c(
    upsilon: ExactReal,
    b: ExactReal,
    c: ExactReal,
    lam: ExactReal,
    y: ExactReal,
    upper: Vec<(ExactReal, f64)>,
    lower: Vec<(ExactReal, f64)>,
    opts: &RamanujanOptions,
) -> Result<RamanujanResult> {
    let spec = IntegralSpec::new(upsilon, b, c, lam, y, Theta::GammaRatio { upper, lower })?;
    sum_spec(&spec, opts)
}

/// istar_c with Θ(k) = ∏(αᵢ)_k/∏(βⱼ)_k.
pub fn k_c(
    upsilon: ExactReal,
    b: ExactReal,
    c: ExactReal,
    lam: ExactReal,
    y: ExactReal,
    num: Vec<ExactReal>,
    den: Vec<ExactReal>,
    opts: &RamanujanOptions,
) -> Result<RamanujanResult> {
    let spec = IntegralSpec::new(upsilon, b, c, lam, y, Theta::PochhammerRatio { num, den })?;
    sum_spec(&spec, opts)
}

/// ∫₀^∞ x^(υ-1) cos(xy) / (e^(b√x) − 1)^λ dx.
pub fn i_c(upsilon: ExactReal, b: ExactReal, lam: ExactReal, y: ExactReal, opts: &RamanujanOptions) -> Result<RamanujanResult> {
    if lam.to_f64() <= 0.0 || b.to_f64() <= 0.0 {
        return Err(Error::Domain("I_C needs lambda > 0 and b > 0".into()));
    }
    let spec = IntegralSpec::new(upsilon, b.clone(), b, lam.clone(), y, Theta::Pochhammer(lam))?;
    sum_spec(&spec, opts)
}

/// ∫₀^∞ x^m cos(πnx) / (e^(2π√x) − 1) dx.
pub fn r_c(m: u32, n: &ExactReal, opts: &RamanujanOptions) -> Result<RamanujanResult> {
    if n.to_f64() <= 0.0 {
        return Err(Error::Domain(format!("n = {n} must be positive")));
    }
    let two_pi = ExactReal::int(2) * ExactReal::pi();
    i_c(ExactReal::int(m as i64 + 1), two_pi, ExactReal::int(1), n.clone() * ExactReal::pi(), opts)
}

/// Quadrature oracle for I_C in double precision.
pub fn i_c_quadrature(upsilon: f64, b: f64, lam: f64, y: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let g = move |x: f64| x.powf(upsilon - 1.0) * (b * x.sqrt()).exp_m1().powf(-lam);
    fct_quadrature(&g, y, cfg)
}

pub fn r_c_quadrature(m: u32, n: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    i_c_quadrature(m as f64 + 1.0, 2.0 * std::f64::consts::PI, 1.0, n * std::f64::consts::PI, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiMethod {
    Series,
    Quadrature,
}

/// Φ(n) = ∫₀^∞ cos(πnx)/(e^(2π√x) − 1) dx.
pub fn phi(n: &ExactReal, method: PhiMethod, opts: &RamanujanOptions) -> Result<RamanujanResult> {
    match method {
        PhiMethod::Series => r_c(0, n, opts),
        PhiMethod::Quadrature => {
            let q = r_c_quadrature(0, n.to_f64(), &QuadratureConfig::default())?;
            Ok(quadrature_result(q, opts.digits))
        }
    }
}

fn quadrature_result(q: QuadratureResult, digits: u32) -> RamanujanResult {
    RamanujanResult {
        value: PrecisionReal::from_f64(q.value, digits),
        k_terms: 0,
        tail_bound: PrecisionReal::from_f64(q.error, digits),
        tail_value: PrecisionReal::zero(digits),
        tail_method: TailMethod::None,
        per_k_cancellation_max: PrecisionReal::from_i64(1, digits),
        method: Method::Quadrature,
        dual_path_max: None,
        k_cancellation: PrecisionReal::from_i64(1, digits),
    }
}

fn phi_quadrature(n: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    r_c_quadrature(0, n, cfg)
}

/// Υ(n) = 1/(2πn) + ∫₀^∞ sin(πnx)/(e^(2π√x) − 1) dx, by quadrature.
pub fn upsilon_fn(n: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("n = {n} must be positive")));
    }
    let pi = std::f64::consts::PI;
    let g = |x: f64| 1.0 / (2.0 * pi * x.sqrt()).exp_m1();
    let q = fst_quadrature(&g, n * pi, cfg)?;
    Ok(QuadratureResult { value: q.value + 1.0 / (2.0 * pi * n), ..q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reciprocity {
    /// Φ(n) = (1/n)√(2/n) Υ(1/n) − Υ(n)
    PhiFromUpsilon,
    /// Υ(n) = (1/n)√(2/n) Φ(1/n) + Φ(n)
    UpsilonFromPhi,
}

impl Reciprocity {
    pub fn label(self) -> &'static str {
        match self {
            Reciprocity::PhiFromUpsilon => "phi-from-upsilon",
            Reciprocity::UpsilonFromPhi => "upsilon-from-phi",
        }
    }
}

/// |LHS − RHS| of a reciprocity relation, every piece by quadrature.
pub fn reciprocity_residual(n: f64, which: Reciprocity, cfg: &QuadratureConfig) -> Result<f64> {
    let k = (2.0 / n).sqrt() / n;
    Ok(match which {
        Reciprocity::PhiFromUpsilon => {
            let lhs = phi_quadrature(n, cfg)?.value;
            let rhs = k * upsilon_fn(1.0 / n, cfg)?.value - upsilon_fn(n, cfg)?.value;
            (lhs - rhs).abs()
        }
        Reciprocity::UpsilonFromPhi => {
            let lhs = upsilon_fn(n, cfg)?.value;
            let rhs = k * phi_quadrature(1.0 / n, cfg)?.value + phi_quadrature(n, cfg)?.value;
            (lhs - rhs).abs()
        }
    })
}

/// Substitutes the Υ-from-Φ relation into Φ-from-Υ and compares with the
/// directly computed Φ(n).
pub fn reciprocity_composition_residual(n: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let k = |m: f64| (2.0 / m).sqrt() / m;
    let ups = |m: f64| -> Result<f64> { Ok(k(m) * phi_quadrature(1.0 / m, cfg)?.value + phi_quadrature(m, cfg)?.value) };
    let composed = k(n) * ups(1.0 / n)? - ups(n)?;
    Ok((composed - phi_quadrature(n, cfg)?.value).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{damped_cos_series, DampedCosSpec};
    use std::f64::consts::PI;

    fn r(x: f64) -> PrecisionReal {
        PrecisionReal::from_f64(x, 50)
    }

    fn e(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn close(a: &PrecisionReal, b: &Float) -> f64 {
        Float::with_val(300, a.value() - b).abs().to_f64()
    }

    #[test]
    fn series_matches_quadrature() {
        let v = inner_integral_series_exact(&e("1"), &e("2*pi"), &e("2*pi"), 50).unwrap();
        let q = fct_quadrature(&|x: f64| (-2.0 * PI * x.sqrt()).exp(), 2.0 * PI, &QuadratureConfig::default()).unwrap();
        assert!((v.value.to_f64() - q.value).abs() < 1e-10);
        let v = inner_integral_series_exact(&e("3/2"), &e("2*pi"), &e("pi"), 50).unwrap();
        let q = fct_quadrature(&|x: f64| x.sqrt() * (-2.0 * PI * x.sqrt()).exp(), PI, &QuadratureConfig::default()).unwrap();
        assert!((v.value.to_f64() - q.value).abs() < 1e-10);
    }

    #[test]
    fn series_matches_damped_cosine() {
        let v = inner_integral_series(&r(1.75), &r(3.0), &r(2.0), 50).unwrap();
        let d = damped_cos_series(&DampedCosSpec::new(r(0.75), r(3.0), r(0.5), r(2.0)).unwrap(), 50).unwrap();
        assert!(close(&v.value, d.value.value().real()) < 1e-46);
    }

    #[test]
    fn three_routes_agree() {
        for (u, a, y) in [(1.0, 2.0 * PI, 2.0 * PI), (2.0, 1.0, 1.0), (0.7, 9.0, 1.3), (2.5, 4.0, 5.0)] {
            let s = inner_integral_series(&r(u), &r(a), &r(y), 50).unwrap();
            let f = inner_integral_2f3(&r(u), &r(a), &r(y), 50).unwrap();
            assert!(close(&s.value, f.value.value()) < 1e-46, "{u} {a} {y}");
        }
        let s = inner_integral_series(&r(1.3), &r(40.0), &r(2.0), 50).unwrap();
        let t = inner_integral_asymptotic(&r(1.3), &r(40.0), &r(2.0), 50).unwrap();
        assert!(close(&s.value, t.value.value()) < 1e-46 * s.value.to_f64().abs().max(1e-300) + 1e-60);
        assert!(inner_integral_asymptotic(&r(1.0), &r(2.0), &r(2.0), 50).is_err());
    }

    #[test]
    fn zero_damping_limit() {
        // a = 0: y^-υ Γ(υ) cos(υπ/2)
        let v = inner_integral_2f3(&r(0.4), &r(0.0), &r(3.0), 50).unwrap();
        let p = 200;
        let u = Float::with_val(p, 0.4);
        let expect = Float::with_val(p, 3).pow(-Float::with_val(p, &u)) * gamma_real(&u, p).unwrap()
            * (Float::with_val(p, &u * Float::with_val(p, Constant::Pi)) / 2u32).cos();
        assert!(close(&v.value, &expect) < 1e-46);
    }

    #[test]
    fn single_term_theta() {
        let spec = IntegralSpec::new(e("1.5"), e("2"), e("3"), e("1/2"), e("2"), Theta::single()).unwrap();
        let v = istar_c(&spec, &RamanujanOptions::default()).unwrap();
        let f = inner_integral_exact(&e("1.5"), &e("1"), &e("2"), 50).unwrap();
        assert!(close(&v.value, f.value.value()) < 1e-45);
    }

    #[test]
    fn one_sixteenth() {
        let v = r_c(0, &e("2"), &RamanujanOptions::default()).unwrap();
        assert!(close(&v.value, &Float::with_val(200, 0.0625)) < 1e-40, "{}", v.value);
        assert_eq!(v.tail_method, TailMethod::ClosedForm);
        assert!(v.tail_bound.to_f64() < 1e-40);
    }

    #[test]
    fn pochhammer_theta_equals_i_c() {
        let opts = RamanujanOptions::default();
        let spec = IntegralSpec::new(e("1.3"), e("3"), e("3"), e("2"), e("1.7"), Theta::Pochhammer(e("2"))).unwrap();
        let a = istar_c(&spec, &opts).unwrap();
        let b = i_c(e("1.3"), e("3"), e("2"), e("1.7"), &opts).unwrap();
        assert_eq!(a.value, b.value);
        let q = i_c_quadrature(1.3, 3.0, 2.0, 1.7, &QuadratureConfig::default()).unwrap();
        assert!((a.value.to_f64() - q.value).abs() < 1e-8, "{} {}", a.value.to_f64(), q.value);
    }

    #[test]
    fn non_integer_lambda_uses_stirling_tail() {
        let opts = RamanujanOptions::default();
        let v = i_c(e("2.2"), e("1.5"), e("0.75"), e("3.5"), &opts).unwrap();
        assert_eq!(v.tail_method, TailMethod::ClosedForm);
        let q = i_c_quadrature(2.2, 1.5, 0.75, 3.5, &QuadratureConfig::default()).unwrap();
        assert!((v.value.to_f64() - q.value).abs() < 1e-9, "{} {}", v.value.to_f64(), q.value);
        // the same value splitting the k-sum elsewhere
        let spec = IntegralSpec::new(e("2.2"), e("1.5"), e("1.5"), e("0.75"), e("3.5"), Theta::Pochhammer(e("0.75"))).unwrap();
        let model = tail_model(&spec.theta).unwrap();
        let TailModel::Stirling(st) = model else { panic!() };
        let prec = bits_for_digits(60);
        for kk in [60u64, 90] {
            let t = match stirling_tail(&spec, &st, kk, 55) {
                Ok(t) => t,
                Err(_) => panic!("tail at K = {kk}"),
            };
            let w = weights(&spec.theta, kk + 1, prec).unwrap();
            let d = direct_sum(&spec, &w, 55, false).unwrap();
            let total = Float::with_val(prec, d.value + t.value);
            assert!(close(&v.value, &total) < 1e-40, "K = {kk}");
        }
    }

    #[test]
    fn fox_wright_kernel_factorial() {
        // Θ(k) = Γ(1+k) = k!: Φ(1)
        let opts = RamanujanOptions::default();
        let v = j_c(e("1"), e("2*pi"), e("2*pi"), e("1"), e("pi"), vec![(e("1"), 1.0)], vec![], &opts).unwrap();
        let p = 200;
        let expect = (Float::with_val(p, 2) - Float::with_val(p, 2).sqrt()) / 8u32;
        assert!(close(&v.value, &expect) < 1e-40);
    }

    #[test]
    fn kernel_reductions() {
        let opts = RamanujanOptions::default();
        let u = || e("1.4");
        // K_C with Θ = 1·(1)_k/(1)_k: weights 1/k!
        let k1 = k_c(u(), e("1"), e("2"), e("1"), e("1.5"), vec![e("1")], vec![e("1")], &opts).unwrap();
        let j1 = j_c(u(), e("1"), e("2"), e("1"), e("1.5"), vec![(e("1"), 1.0)], vec![(e("1"), 1.0)], &opts).unwrap();
        assert!(close(&k1.value, j1.value.value()) < 1e-40);
        // K_C · ∏Γ(α)/∏Γ(β) = J_C with unit coefficients
        let k2 = k_c(u(), e("1"), e("2"), e("1"), e("1.5"), vec![e("1.5"), e("2")], vec![e("2.5")], &opts).unwrap();
        let j2 = j_c(u(), e("1"), e("2"), e("1"), e("1.5"), vec![(e("1.5"), 1.0), (e("2"), 1.0)], vec![(e("2.5"), 1.0)], &opts).unwrap();
        let p = 200;
        let g = |x: f64| gamma_real(&Float::with_val(p, x), p).unwrap();
        let scaled = Float::with_val(p, k2.value.value() * g(1.5)) * g(2.0) / g(2.5);
        assert!(close(&j2.value, &scaled) < 1e-38);
        // binomial kernel is I_C
        let k3 = k_c(u(), e("2"), e("2"), e("1.5"), e("1.5"), vec![e("1.5")], vec![], &opts).unwrap();
        let i3 = i_c(u(), e("2"), e("1.5"), e("1.5"), &opts).unwrap();
        assert!(close(&k3.value, i3.value.value()) < 1e-40);
    }

    #[test]
    fn unbounded_kernels_are_rejected() {
        let opts = RamanujanOptions::default();
        let r1 = j_c(e("1"), e("1"), e("1"), e("1"), e("1"), vec![(e("1"), 2.0)], vec![], &opts);
        assert!(matches!(r1, Err(Error::Domain(_))));
        let r2 = k_c(e("1"), e("1"), e("1"), e("1"), e("1"), vec![e("1"), e("1"), e("1")], vec![], &opts);
        assert!(matches!(r2, Err(Error::Domain(_))));
        assert!(IntegralSpec::new(e("1"), e("-1"), e("1"), e("1"), e("1"), Theta::single()).is_err());
        assert!(i_c(e("1"), e("1"), e("2"), e("1"), &opts).is_err());
    }

    #[test]
    fn fixed_k_respects_majorant() {
        let opts = |k| RamanujanOptions { k: KChoice::Fixed(k), ..RamanujanOptions::default() };
        let full = r_c(0, &e("1"), &RamanujanOptions::default()).unwrap();
        let mut prev = f64::INFINITY;
        for k in [5u64, 10, 20, 40] {
            let v = r_c(0, &e("1"), &opts(k)).unwrap();
            let b = v.tail_bound.to_f64();
            assert!(b < prev);
            prev = b;
            assert!((v.value.to_f64() - full.value.to_f64()).abs() <= b);
        }
    }

    #[test]
    fn reciprocity_examples() {
        let cfg = QuadratureConfig::default();
        let u1 = upsilon_fn(1.0, &cfg).unwrap();
        assert!((u1.value - 2f64.sqrt() / 8.0).abs() < 1e-8);
        assert!(reciprocity_residual(2.0, Reciprocity::PhiFromUpsilon, &cfg).unwrap() < 1e-8);
        assert!(reciprocity_residual(0.5, Reciprocity::UpsilonFromPhi, &cfg).unwrap() < 1e-8);
        assert!(reciprocity_composition_residual(1.0, &cfg).unwrap() < 1e-8);
    }

    #[test]
    fn stirling_tail_bound_is_tight_for_small_c() {
        // y/c^2 > 4: the large-a coefficients grow fast, each needs its own decay
        let args = || (e("2.52"), e("1.25"), e("1.77"), e("6.66"));
        let (u, b, l, y) = args();
        let lo = i_c(u, b, l, y, &RamanujanOptions::default()).unwrap();
        let (u, b, l, y) = args();
        let hi = i_c(u, b, l, y, &RamanujanOptions { digits: 80, tolerance: 1e-30, ..RamanujanOptions::default() }).unwrap();
        let b = lo.tail_bound.to_f64();
        assert!(b < 1e-45, "{b:e}");
        assert!((&lo.value - &hi.value.with_digits(50)).abs().to_f64() <= b + 1e-48);
    }
}
