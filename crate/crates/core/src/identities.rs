//! Closed-form values of R_C(m, n) and the nine hypergeometric summation
//! identities obtained by equating them with the k-series of R_C.
//!
//! Each identity has the form Σ_k Σ_p coef_p (k+1)^(e_p) ₚF_q(…; z_k) = rhs
//! with z_k = −π²(k+1)⁴/(4n²). Summed piece by piece the k-series diverge;
//! grouped per k, the bracket equals norm · F_(m+1)(2π(k+1), nπ) and decays
//! like (k+1)^(-2m-2). The tail past the direct range is the closed-form
//! Hurwitz tail from the ramanujan module.

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::hypergeom::{pfq_exact_raw, PfqOptions};
use crate::precision::{bits_for_digits, log10_abs, ExactReal, PrecisionReal};
use crate::ramanujan::{r_c, r_c_quadrature, unit_weight_tail, RamanujanOptions, RamanujanResult};
use crate::transforms::{QuadratureConfig, QuadratureResult};

pub const CLOSED_FORM_SERIES_TOL: f64 = 1e-10;
pub const CLOSED_FORM_QUADRATURE_TOL: f64 = 1e-8;
pub const IDENTITY_TOL: f64 = 1e-6;

fn ex(s: &str) -> ExactReal {
    s.parse().expect("catalog literal")
}

#[derive(Clone, Debug)]
pub struct ClosedFormEntry {
    pub id: &'static str,
    pub m: u32,
    pub n: ExactReal,
    pub exact: ExactReal,
}

/// The nine known values R_C(m, n) (Φ(n) = R_C(0, n)).
pub fn closed_form_catalog() -> Vec<ClosedFormEntry> {
    let e = |id, m, n: &str, exact: &str| ClosedFormEntry { id, m, n: ex(n), exact: ex(exact) };
    vec![
        e("rc-1-1/2", 1, "1/2", "(13 - 4*pi)/(8*pi^2)"),
        e("rc-1-2", 1, "2", "(1/2 - 3/pi + 5/pi^2)/64"),
        e("rc-2-2", 2, "2", "(1 - 5/pi + 5/pi^2)/256"),
        e("phi-1", 0, "1", "(2 - sqrt(2))/8"),
        e("phi-2", 0, "2", "1/16"),
        e("phi-4", 0, "4", "(3 - sqrt(2))/32"),
        e("phi-6", 0, "6", "(13 - 4*sqrt(3))/144"),
        e("phi-1/2", 0, "1/2", "1/(4*pi)"),
        e("phi-2/5", 0, "2/5", "(8 - 3*sqrt(5))/16"),
    ]
}

fn find<'a, T>(items: &'a [T], id: &str, key: impl Fn(&T) -> &str) -> Result<&'a T> {
    items.iter().find(|x| key(x) == id).ok_or_else(|| Error::Domain(format!("unknown id {id:?}")))
}

#[derive(Clone, Debug)]
pub struct ClosedFormCheck {
    pub id: &'static str,
    pub exact: PrecisionReal,
    pub series: RamanujanResult,
    pub series_residual: PrecisionReal,
    pub quadrature: QuadratureResult,
    pub quadrature_residual: f64,
}

impl ClosedFormCheck {
    pub fn pass(&self) -> bool {
        self.series_residual.to_f64() < CLOSED_FORM_SERIES_TOL && self.quadrature_residual < CLOSED_FORM_QUADRATURE_TOL
    }
}

pub fn verify_closed_form(id: &str, digits: u32) -> Result<ClosedFormCheck> {
    let cat = closed_form_catalog();
    let entry = find(&cat, id, |e| e.id)?;
    let exact = PrecisionReal::from_exact(&entry.exact, digits);
    let series = r_c(entry.m, &entry.n, &RamanujanOptions::with_digits(digits))?;
    let series_residual = (&series.value - &exact).abs();
    let quadrature = r_c_quadrature(entry.m, entry.n.to_f64(), &QuadratureConfig::default())?;
    let quadrature_residual = (quadrature.value - exact.to_f64()).abs();
    Ok(ClosedFormCheck {
        id: entry.id,
        exact,
        series,
        series_residual,
        quadrature,
        quadrature_residual,
    })
}

/// coef · (k+1)^power · ₚF_q(num; den; z_k)
#[derive(Clone, Debug)]
pub struct Piece {
    pub coef: ExactReal,
    pub power: u32,
    pub num: Vec<ExactReal>,
    pub den: Vec<ExactReal>,
}

#[derive(Clone, Debug)]
pub struct SummationIdentity {
    pub id: &'static str,
    pub m: u32,
    pub n: ExactReal,
    pub rhs_exact: ExactReal,
    pub pieces: Vec<Piece>,
    /// Σ_k grouped_term(k) = normalization · R_C(m, n).
    pub normalization: ExactReal,
}

fn piece(coef: ExactReal, power: u32, num: &[&str], den: &[&str]) -> Piece {
    Piece { coef, power, num: num.iter().map(|s| ex(s)).collect(), den: den.iter().map(|s| ex(s)).collect() }
}

fn m0_identity(id: &'static str, n: &str, rhs: &str) -> SummationIdentity {
    let nv = ex(n);
    // S1 − (2√2/√n) S2 + (π/n) S3 = √2 n^(3/2) Φ(n)
    let c2 = -(ExactReal::int(2) * ExactReal::int(2).sqrt() / nv.clone().sqrt());
    let c3 = ExactReal::pi() / nv.clone();
    SummationIdentity {
        id,
        m: 0,
        n: nv.clone(),
        rhs_exact: ex(rhs),
        pieces: vec![
            piece(ExactReal::int(1), 1, &[], &["1/2"]),
            piece(c2, 2, &["1"], &["3/4", "5/4"]),
            piece(c3, 3, &[], &["3/2"]),
        ],
        normalization: ExactReal::int(2).sqrt() * nv.clone() * nv.sqrt(),
    }
}

fn m1_identity(id: &'static str, n: &str, rhs: &str) -> SummationIdentity {
    let nv = ex(n);
    let rn = nv.clone().sqrt();
    let s2 = ExactReal::int(2).sqrt();
    // S0 − (3√2/4)π n^(-1/2) S1 + (5√2/4)π² n^(-3/2) S3 = −(nπ)² R_C(1, n)
    let c1 = -(ExactReal::int(3) * s2.clone() * ExactReal::pi() / (ExactReal::int(4) * rn.clone()));
    let c3 = ExactReal::int(5) * s2 * ExactReal::pi().powi(2) / (ExactReal::int(4) * nv.clone() * rn);
    SummationIdentity {
        id,
        m: 1,
        n: nv.clone(),
        rhs_exact: ex(rhs),
        pieces: vec![
            piece(ExactReal::int(1), 0, &["1", "3/2"], &["1/4", "1/2", "3/4"]),
            piece(c1, 1, &["7/4"], &["1/2", "3/4"]),
            piece(c3, 3, &["9/4"], &["5/4", "3/2"]),
        ],
        normalization: -(nv * ExactReal::pi()).powi(2),
    }
}

/// The nine identities, in the order m = 1 (n = 1/2, 2), m = 2 (n = 2),
/// m = 0 (n = 1, 2, 4, 6, 1/2, 2/5).
pub fn summation_identities() -> Vec<SummationIdentity> {
    let m2 = SummationIdentity {
        id: "m2-n2",
        m: 2,
        n: ex("2"),
        rhs_exact: ex("pi^2/60*(5/pi - 5/pi^2 - 1)"),
        pieces: vec![
            piece(ExactReal::int(1), 1, &["7/4", "9/4"], &["1/2", "3/4", "5/4"]),
            piece(ex("-16/5"), 2, &["2", "5/2"], &["3/4", "5/4", "3/2"]),
            piece(ex("7*pi/6"), 3, &["9/4", "11/4"], &["5/4", "3/2", "7/4"]),
        ],
        normalization: ex("-64*pi^2/15"),
    };
    vec![
        m1_identity("m1-n1/2", "1/2", "(4*pi - 13)/32"),
        m1_identity("m1-n2", "2", "pi^2/16*(3/pi - 1/2 - 5/pi^2)"),
        m2,
        m0_identity("m0-n1", "1", "(sqrt(2) - 1)/4"),
        m0_identity("m0-n2", "2", "1/4"),
        m0_identity("m0-n4", "4", "(3*sqrt(2) - 2)/4"),
        m0_identity("m0-n6", "6", "(13*sqrt(3) - 12)/12"),
        m0_identity("m0-n1/2", "1/2", "1/(8*pi)"),
        m0_identity("m0-n2/5", "2/5", "(8*sqrt(5) - 15)/100"),
    ]
}

#[derive(Clone, Debug)]
pub struct GroupedTerm {
    pub value: PrecisionReal,
    pub error: PrecisionReal,
    pub pieces: Vec<PrecisionReal>,
}

struct RawTerm {
    value: Float,
    error: Float,
    pieces: Vec<Float>,
}

impl SummationIdentity {
    fn z(&self, k: u64) -> ExactReal {
        let k1 = ExactReal::int(k as i64 + 1);
        -(ExactReal::pi().powi(2) * k1.powi(4) / (ExactReal::int(4) * self.n.clone().powi(2)))
    }

    fn pieces_at(&self, k: u64, piece_digits: u32, cap_factor: u32) -> Result<RawTerm> {
        let prec = bits_for_digits(piece_digits + 10);
        let z = self.z(k);
        let opts = PfqOptions { max_digits_factor: cap_factor, max_digits_floor: 0, ..PfqOptions::default() };
        let mut value = Float::with_val(prec, 0);
        let mut error = Float::with_val(64, 0);
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let f = pfq_exact_raw(&p.num, &p.den, &z, piece_digits, &opts)?;
            let scale = p.coef.eval(prec) * Float::with_val(prec, k + 1).pow(p.power);
            let v = Float::with_val(prec, f.value.real() * &scale);
            error += Float::with_val(64, &f.trunc * Float::with_val(64, scale.abs_ref()));
            error += Float::with_val(64, v.abs_ref()) * 10f64.powi(-(piece_digits as i32));
            value += &v;
            pieces.push(v);
        }
        Ok(RawTerm { value, error, pieces })
    }

    fn grouped_raw(&self, k: u64, digits: u32) -> Result<RawTerm> {
        // the pieces grow like (k+1)^3 while the bracket decays; one retry
        // with the observed loss added
        let cap_factor = 4;
        let first = self.pieces_at(k, digits + 10, cap_factor)?;
        let largest = first.pieces.iter().map(log10_abs).fold(f64::NEG_INFINITY, f64::max);
        let loss = largest - log10_abs(&first.value);
        if !loss.is_finite() || loss <= 7.0 {
            return Ok(first);
        }
        let piece_digits = digits + loss.ceil() as u32 + 10;
        if piece_digits > cap_factor * digits {
            return Err(Error::PrecisionExhausted { needed: piece_digits, cap: cap_factor * digits });
        }
        self.pieces_at(k, piece_digits, cap_factor)
    }

    /// The per-k bracket Σ_p coef_p (k+1)^(e_p) ₚF_q(…; z_k).
    pub fn grouped_term(&self, k: u64, digits: u32) -> Result<GroupedTerm> {
        let r = self.grouped_raw(k, digits)?;
        Ok(GroupedTerm {
            value: PrecisionReal::from_float(r.value, digits),
            error: PrecisionReal::from_float(r.error, digits),
            pieces: r.pieces.into_iter().map(|p| PrecisionReal::from_float(p, digits)).collect(),
        })
    }

    /// normalization · F_(m+1)(2π(k+1), nπ): what grouped_term(k) equals.
    pub fn grouped_term_integral(&self, k: u64) -> (ExactReal, ExactReal, ExactReal) {
        let two_pi = ExactReal::int(2) * ExactReal::pi();
        (
            ExactReal::int(self.m as i64 + 1),
            two_pi * ExactReal::int(k as i64 + 1),
            self.n.clone() * ExactReal::pi(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub id: &'static str,
    pub rhs: PrecisionReal,
    pub computed: PrecisionReal,
    pub residual: PrecisionReal,
    /// Directly summed k = 0..k_terms-1.
    pub k_terms: u64,
    pub tail_value: PrecisionReal,
    /// Per-k truncation and rounding errors plus the tail remainder.
    pub tail_bound: PrecisionReal,
    pub grouped: bool,
}

impl IdentityCheck {
    pub fn pass(&self) -> bool {
        self.residual.to_f64() < IDENTITY_TOL
    }
}

/// Σ_k grouped_term(k) against the right-hand side.
pub fn verify_summation_identity(id: &str, digits: u32) -> Result<IdentityCheck> {
    let all = summation_identities();
    let ident = find(&all, id, |s| s.id)?;
    let prec = bits_for_digits(digits + 10);
    let (u, a0, y) = ident.grouped_term_integral(0);
    let c = ExactReal::int(2) * ExactReal::pi();
    let (kk, tail, tail_err) = unit_weight_tail(&u, &a0, &c, &y, digits)?;
    let norm = ident.normalization.eval(prec);
    let mut sum = Float::with_val(prec, 0);
    let mut err = Float::with_val(64, 0);
    for k in 0..=kk {
        let t = match ident.grouped_raw(k, digits) {
            Err(e) if e.is_numeric() => ident.grouped_raw(k, digits + digits / 2)?,
            other => other?,
        };
        sum += t.value;
        err += t.error;
    }
    let tail_value = Float::with_val(prec, &tail * &norm);
    sum += &tail_value;
    err += Float::with_val(64, tail_err * Float::with_val(64, norm.abs_ref()));
    let rhs = PrecisionReal::from_exact(&ident.rhs_exact, digits);
    let computed = PrecisionReal::from_float(sum, digits);
    let residual = (&computed - &rhs).abs();
    Ok(IdentityCheck {
        id: ident.id,
        rhs,
        computed,
        residual,
        k_terms: kk + 1,
        tail_value: PrecisionReal::from_float(tail_value, digits),
        tail_bound: PrecisionReal::from_float(err, digits),
        grouped: true,
    })
}

#[derive(Clone, Debug)]
pub struct SeparatedSums {
    pub id: &'static str,
    /// partial[p][K] = Σ_{k≤K} of piece p alone.
    pub partial: Vec<Vec<PrecisionReal>>,
    /// Σ_{k≤K} of the grouped bracket, for comparison.
    pub grouped: Vec<PrecisionReal>,
}

impl SeparatedSums {
    /// max |partial sum| over the second half of the range divided by the
    /// same over the first half; well above 1 for a diverging sum.
    pub fn growth(&self, piece: usize) -> f64 {
        let p = &self.partial[piece];
        let h = p.len() / 2;
        let max = |s: &[PrecisionReal]| s.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
        max(&p[h..]) / max(&p[..h])
    }
}

/// Partial sums of each piece summed on its own over k < count.
pub fn separated_partial_sums(id: &str, count: u64, digits: u32) -> Result<SeparatedSums> {
    let all = summation_identities();
    let ident = find(&all, id, |s| s.id)?;
    let prec = bits_for_digits(digits + 10);
    let np = ident.pieces.len();
    let mut acc = vec![Float::with_val(prec, 0); np];
    let mut gacc = Float::with_val(prec, 0);
    let mut partial = vec![Vec::new(); np];
    let mut grouped = Vec::new();
    for k in 0..count {
        let t = ident.grouped_raw(k, digits)?;
        for (i, p) in t.pieces.iter().enumerate() {
            acc[i] += p;
            partial[i].push(PrecisionReal::from_float(acc[i].clone(), digits));
        }
        gacc += &t.value;
        grouped.push(PrecisionReal::from_float(gacc.clone(), digits));
    }
    Ok(SeparatedSums { id: ident.id, partial, grouped })
}
