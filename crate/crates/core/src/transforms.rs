//! Fourier cosine (and sine) transforms on (0, ∞): a double-precision
//! quadrature oracle, the Mellin-cosine closed form and the damped-cosine
//! series.
//!
//! The oracle deliberately shares no code with the multiprecision series: it
//! integrates between consecutive zeros of the kernel with adaptive
//! Gauss-Kronrod and accelerates the block sums with Wynn's ε algorithm.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::hypergeom::{ConvergenceClass, ConvergenceTag, SeriesEvaluation};
use crate::precision::{bits_for_digits, gamma_real, ln_gamma_real, log10_abs, PrecisionComplex, PrecisionReal, QuarterPhase};
use crate::seriestools::Stopper;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regularization {
    None,
    /// Multiply by e^(-εx) for ε = eps0/2^i, i < levels, and extrapolate to
    /// ε = 0. `eps0 = None` means y/4.
    Exponential { eps0: Option<f64>, levels: u32 },
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_period_blocks: usize,
    pub regularization: Regularization,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-13, abs_tol: 1e-15, max_period_blocks: 20_000, regularization: Regularization::None }
    }
}

impl QuadratureConfig {
    pub fn regularized() -> Self {
        Self { regularization: Regularization::Exponential { eps0: None, levels: 8 }, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        if self.max_period_blocks < 8 {
            return Err(Error::Domain("max_period_blocks must be at least 8".into()));
        }
        if let Regularization::Exponential { eps0, levels } = self.regularization {
            if levels < 2 || eps0.is_some_and(|e| !(e > 0.0)) {
                return Err(Error::Domain("regularization needs eps0 > 0 and at least 2 levels".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub blocks: usize,
}

impl QuadratureResult {
    pub fn to_precision(&self, digits: u32) -> PrecisionReal {
        PrecisionReal::from_f64(self.value, digits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    Cos,
    Sin,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod value, |K − G|, and the Kronrod estimate of ∫|f|.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for i in 0..7 {
        let dx = h * XGK[i];
        let (l, r) = (f(c - dx), f(c + dx));
        k += WGK[i] * (l + r);
        abs += WGK[i] * (l.abs() + r.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (l + r);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

/// Returns (value, error, ∫|f|). Panels stop refining once the error is at
/// the rounding level of ∫|f|, so cancelling panels cannot recurse forever.
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64, f64) {
    let (v, e, abs) = gk15(f, a, b);
    if e <= tol.max(50.0 * f64::EPSILON * abs) || depth == 0 || !v.is_finite() {
        return (v, e, abs);
    }
    let m = 0.5 * (a + b);
    let (l, el, al) = adaptive(f, a, m, tol * 0.5, depth - 1);
    let (r, er, ar) = adaptive(f, m, b, tol * 0.5, depth - 1);
    (l + r, el + er, al + ar)
}

/// Wynn ε extrapolation of a sequence of partial sums; returns the last
/// entry of the highest even column.
fn wynn(s: &[f64]) -> f64 {
    let mut prev = vec![0.0; s.len() + 1];
    let mut cur = s.to_vec();
    let mut best = *s.last().unwrap_or(&0.0);
    let mut col = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                // already converged in this column
                return if col % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        col += 1;
        if col % 2 == 0 {
            match next.last() {
                Some(v) if v.is_finite() => best = *v,
                _ => return best,
            }
        }
        prev = cur;
        cur = next;
    }
    best
}

/// ∫₀^x0 of an integrand that may be singular (integrably) at 0.
fn first_block(f: &dyn Fn(f64) -> f64, x0: f64, tol: f64) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut err = 0.0;
    let mut hi = x0;
    let mut prev_c = f64::NAN;
    let mut prev_r = f64::NAN;
    for level in 0..600 {
        let lo = hi * 0.5;
        let (c, e, _) = adaptive(f, lo, hi, tol * 1e-3, 40);
        if !c.is_finite() {
            return Err(Error::Domain("integrand is not finite near the origin".into()));
        }
        total += c;
        err += e;
        hi = lo;
        let r = c / prev_c;
        if level >= 2 && r.is_finite() {
            if r.abs() >= 0.999 && level > 40 {
                return Err(Error::Domain("integrand is not integrable at the origin".into()));
            }
            let rest = c * r / (1.0 - r);
            if c.abs() < tol * 1e-4 || (level > 12 && (r - prev_r).abs() < 1e-9 && r.abs() < 0.999) {
                total += rest;
                err += (rest * (r - prev_r)).abs() * 10.0 + c.abs() * 1e-3 * f64::EPSILON;
                return Ok((total, err));
            }
        }
        if c == 0.0 {
            return Ok((total, err));
        }
        prev_r = r;
        prev_c = c;
    }
    Err(Error::Domain("integrand is not integrable at the origin".into()))
}

fn oscillatory(g: &dyn Fn(f64) -> f64, y: f64, kernel: Kernel, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let period = std::f64::consts::PI / y;
    let f = |x: f64| {
        let k = match kernel {
            Kernel::Cos => (x * y).cos(),
            Kernel::Sin => (x * y).sin(),
        };
        g(x) * k
    };
    // kernel zeros: cos at (k+1/2)π/y, sin at kπ/y
    let offset = match kernel {
        Kernel::Cos => 0.5,
        Kernel::Sin => 1.0,
    };
    let x0 = offset * period;
    let (v0, mut err) = first_block(&f, x0, cfg.abs_tol)?;
    // rounding floor of the partial sums
    let mut noise = v0.abs() * f64::EPSILON;
    let mut partial = vec![v0];
    let mut sum = v0;
    let mut last_est = f64::NAN;
    let mut hits = 0;
    for k in 0..cfg.max_period_blocks {
        let a = (offset + k as f64) * period;
        let (c, e, abs) = adaptive(&f, a, a + period, cfg.abs_tol * 1e-2, 30);
        if !c.is_finite() {
            return Err(Error::Domain(format!("integrand not finite on [{a}, {}]", a + period)));
        }
        err += e;
        noise += (abs + sum.abs()) * f64::EPSILON;
        sum += c;
        partial.push(sum);
        if partial.len() < 6 {
            continue;
        }
        let window = &partial[partial.len().saturating_sub(24)..];
        let est = wynn(window);
        let tol = cfg.abs_tol.max(cfg.rel_tol * est.abs()).max(8.0 * noise);
        let delta = (est - last_est).abs();
        last_est = est;
        if delta <= tol {
            hits += 1;
            if hits >= 2 {
                return Ok(QuadratureResult { value: est, error: err + delta, blocks: k + 2 });
            }
        } else {
            hits = 0;
        }
    }
    Err(Error::NonConvergence(format!("quadrature did not converge within {} blocks", cfg.max_period_blocks)))
}

/// Neville extrapolation of values at nodes h_i to h = 0; returns the value
/// and the difference between the last two orders.
fn neville_to_zero(h: &[f64], v: &[f64]) -> (f64, f64) {
    let n = v.len();
    let mut p = v.to_vec();
    let mut prev_top = p[n - 1];
    let mut top = p[n - 1];
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
        }
        prev_top = top;
        top = p[0];
    }
    (top, (top - prev_top).abs())
}

pub fn fourier_quadrature(
    g: &(dyn Fn(f64) -> f64 + Sync),
    y: f64,
    kernel: Kernel,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(y > 0.0) {
        return Err(Error::Domain(format!("frequency y = {y} must be positive")));
    }
    match cfg.regularization {
        Regularization::None => oscillatory(g, y, kernel, cfg),
        Regularization::Exponential { eps0, levels } => {
            let e0 = eps0.unwrap_or(0.25 * y);
            let mut hs = Vec::new();
            let mut vs = Vec::new();
            let mut err = 0.0;
            let mut blocks = 0;
            for i in 0..levels {
                let eps = e0 / 2f64.powi(i as i32);
                let damped = |x: f64| g(x) * (-eps * x).exp();
                let r = oscillatory(&damped, y, kernel, cfg)?;
                hs.push(eps);
                vs.push(r.value);
                err += r.error;
                blocks += r.blocks;
            }
            let (value, ex) = neville_to_zero(&hs, &vs);
            Ok(QuadratureResult { value, error: err + ex, blocks })
        }
    }
}

/// ∫₀^∞ g(x) cos(xy) dx.
pub fn fct_quadrature(g: &(dyn Fn(f64) -> f64 + Sync), y: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    fourier_quadrature(g, y, Kernel::Cos, cfg)
}

/// ∫₀^∞ g(x) sin(xy) dx.
pub fn fst_quadrature(g: &(dyn Fn(f64) -> f64 + Sync), y: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    fourier_quadrature(g, y, Kernel::Sin, cfg)
}

/// ∫₀^∞ x^(s-1) cos(bx) dx = Γ(s) cos(πs/2) / b^s for 0 < s < 1.
pub fn mellin_cos(s: &PrecisionReal, b: &PrecisionReal) -> Result<PrecisionReal> {
    let digits = s.digits().min(b.digits());
    if !(*s.value() > 0 && *s.value() < 1) {
        return Err(Error::Domain(format!("s = {s} outside the strip 0 < s < 1")));
    }
    if *b.value() <= 0 {
        return Err(Error::Domain(format!("b = {b} must be positive")));
    }
    let prec = bits_for_digits(digits) + 16;
    let g = gamma_real(s.value(), prec)?;
    let c = Float::with_val(prec, s.value() * Float::with_val(prec, Constant::Pi)) / 2u32;
    let bs = Float::with_val(prec, b.value().ln_ref()) * s.value();
    let v = g * c.cos() / bs.exp();
    Ok(PrecisionReal::from_float(v, digits))
}

#[derive(Clone, Debug)]
pub struct DampedCosSpec {
    pub mu: PrecisionReal,
    pub a: PrecisionReal,
    pub xi: PrecisionReal,
    pub y: PrecisionReal,
}

impl DampedCosSpec {
    pub fn new(mu: PrecisionReal, a: PrecisionReal, xi: PrecisionReal, y: PrecisionReal) -> Result<Self> {
        if *mu.value() <= -1 {
            return Err(Error::Domain(format!("mu = {mu} must exceed -1")));
        }
        if *a.value() < 0 || *y.value() <= 0 {
            return Err(Error::Domain("need a >= 0 and y > 0".into()));
        }
        if *xi.value() >= 1 {
            return Err(Error::Divergent(format!("xi = {xi}: the damped-cosine series needs xi < 1")));
        }
        if *xi.value() <= 0 {
            return Err(Error::Domain(format!("xi = {xi} must be positive")));
        }
        Ok(Self { mu, a, xi, y })
    }

    fn digits(&self) -> u32 {
        self.mu.digits().min(self.a.digits()).min(self.xi.digits()).min(self.y.digits())
    }
}

struct DampedSum {
    value: Float,
    abs_sum: Float,
    terms: u64,
    trunc: Float,
    peak: f64,
}

fn damped_at(spec: &DampedCosSpec, target: u32, working: u32) -> Result<DampedSum> {
    let prec = bits_for_digits(working);
    let mu = Float::with_val(prec, spec.mu.value());
    let xi = Float::with_val(prec, spec.xi.value());
    let a = Float::with_val(prec, spec.a.value());
    let y = Float::with_val(prec, spec.y.value());
    let pi = Float::with_val(prec, Constant::Pi);
    // ξ = 1/2 puts every phase on the π/4 grid
    let phase = (*spec.xi.value() == 0.5).then(|| QuarterPhase::new(&mu, prec));
    let ln_r = Float::with_val(prec, a.ln_ref()) - Float::with_val(prec, y.ln_ref()) * &xi;
    let mut sum = Float::with_val(prec, 0);
    let mut abs_sum = Float::with_val(64, 0);
    let mut stop = Stopper::new(target + 2, working);
    let mut ln_fact = Float::with_val(prec, 0);
    let mut prev_env = f64::NAN;
    let mut peak = f64::NEG_INFINITY;
    let a_zero = a.is_zero();
    let mut l: u64 = 0;
    loop {
        if l > 0 {
            ln_fact += Float::with_val(prec, l).ln();
        }
        let arg = Float::with_val(prec, &xi * l) + &mu + 1u32;
        let (lg, sg) = ln_gamma_real(&arg, prec)?;
        // envelope without the sine, for the stopping test
        let le = if l == 0 { lg.clone() } else { Float::with_val(prec, &ln_r * l) + &lg - &ln_fact };
        let env = le.exp();
        let env_log = log10_abs(&env);
        peak = peak.max(env_log);
        let s = match &phase {
            Some(p) => p.sin(l as i64),
            None => {
                let t = Float::with_val(prec, &xi * l) + &mu;
                (t * &pi / 2u32).sin()
            }
        };
        let mut t = env.clone() * s;
        if sg < 0 {
            t = -t;
        }
        if l % 2 == 1 {
            t = -t;
        }
        sum += &t;
        abs_sum += Float::with_val(64, t.abs_ref());
        l += 1;
        if a_zero {
            return Ok(DampedSum { value: sum, abs_sum, terms: 1, trunc: Float::with_val(64, 0), peak });
        }
        let ratio = 10f64.powf(env_log - prev_env);
        prev_env = env_log;
        let small = stop.observe(env_log, log10_abs(&sum), log10_abs(&abs_sum));
        // the envelope ratio decreases monotonically past the peak
        if small && ratio < 1.0 {
            let trunc = Float::with_val(64, &env) * (ratio / (1.0 - ratio));
            return Ok(DampedSum { value: sum, abs_sum, terms: l, trunc, peak });
        }
        if l > 5_000_000 {
            return Err(Error::NonConvergence("damped-cosine series".into()));
        }
    }
}

/// ∫₀^∞ x^μ e^(-a x^ξ) cos(xy) dx by the Maclaurin expansion of the damping:
/// −y^(−μ−1) Σ_ℓ (−a/y^ξ)^ℓ/ℓ! · Γ(μ+1+ξℓ) · sin((π/2)(μ+ξℓ)).
pub fn damped_cos_series(spec: &DampedCosSpec, digits: u32) -> Result<SeriesEvaluation> {
    let pd = spec.digits();
    let mut guard = 8u32;
    let cap = (digits * 20).max(400);
    let mut attempt = 0;
    let (s, working) = loop {
        let working = digits + guard;
        if working > cap.min(pd.max(digits) * 20) {
            return Err(Error::PrecisionExhausted { needed: working, cap });
        }
        let s = damped_at(spec, digits, working)?;
        let loss = s.peak.max(log10_abs(&s.abs_sum)) - log10_abs(&s.value);
        attempt += 1;
        if attempt == 3 || !loss.is_finite() || loss + 3.0 <= guard as f64 {
            break (s, working);
        }
        guard = loss.ceil() as u32 + 8;
    };
    let prec = bits_for_digits(working);
    let mu1 = Float::with_val(prec, spec.mu.value() + 1u32);
    let scale = -(-(Float::with_val(prec, spec.y.value().ln_ref()) * mu1)).exp();
    let sabs = Float::with_val(prec, scale.abs_ref());
    let value = Float::with_val(prec, &s.value * &scale);
    let abs_sum = Float::with_val(prec, &s.abs_sum * &sabs);
    let mag = Float::with_val(prec, value.abs_ref());
    let ci = if mag.is_zero() { Float::with_val(prec, rug::float::Special::Infinity) } else { Float::with_val(prec, &abs_sum / &mag) };
    Ok(SeriesEvaluation {
        value: PrecisionComplex::from_real(&PrecisionReal::from_float(value, digits)),
        terms_used: s.terms,
        abs_sum: PrecisionReal::from_float(abs_sum, digits),
        cancellation_index: PrecisionReal::from_float(ci, digits),
        trunc_error: PrecisionReal::from_float(Float::with_val(prec, &s.trunc * &sabs), digits),
        class: ConvergenceClass { tag: ConvergenceTag::EntireInZ, omega: PrecisionComplex::from_f64(0.0, 0.0, digits) },
        working_digits: working,
    })
}
