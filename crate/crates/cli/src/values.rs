//! Parsing of command-line numeric inputs.

use hypcos_core::ramanujan::Theta;
use hypcos_core::{ExactReal, PrecisionReal};

use crate::CliError;

pub fn exact(s: &str) -> Result<ExactReal, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("cannot parse number {s:?}")))
}

/// Comma-separated exact reals. The empty string is the empty list.
pub fn exact_list(s: &str) -> Result<Vec<ExactReal>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(exact).collect()
}

pub fn nonempty_list(s: &str, what: &str) -> Result<Vec<ExactReal>, CliError> {
    let v = exact_list(s)?;
    if v.is_empty() {
        return Err(CliError::Usage(format!("{what} list is empty")));
    }
    Ok(v)
}

pub fn u32_list(s: &str, what: &str) -> Result<Vec<u32>, CliError> {
    let v: Vec<u32> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("cannot parse {what} entry {t:?}"))))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err(CliError::Usage(format!("{what} list is empty")));
    }
    Ok(v)
}

/// `alpha:A` pairs separated by commas.
pub fn pair_list(s: &str) -> Result<Vec<(ExactReal, f64)>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            let (x, a) = p.split_once(':').unwrap_or((p, "1"));
            let a = exact(a)?.to_f64();
            Ok((exact(x)?, a))
        })
        .collect()
}

/// Θ grammar for `eval istar`:
///   single | pochhammer:L | ratio:a1,a2|b1,b2 | gamma:a1:A1,a2:A2|b1:B1 | power:r (|r| ≤ 1)
pub fn theta(s: &str) -> Result<Theta, CliError> {
    let s = s.trim();
    if s == "single" {
        return Ok(Theta::single());
    }
    let (kind, rest) = s.split_once(':').ok_or_else(|| CliError::Usage(format!("bad theta {s:?}")))?;
    let halves = |r: &str| -> (String, String) {
        match r.split_once('|') {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => (r.to_string(), String::new()),
        }
    };
    match kind {
        "pochhammer" => Ok(Theta::Pochhammer(exact(rest)?)),
        "ratio" => {
            let (a, b) = halves(rest);
            Ok(Theta::PochhammerRatio { num: exact_list(&a)?, den: exact_list(&b)? })
        }
        "gamma" => {
            let (a, b) = halves(rest);
            Ok(Theta::GammaRatio { upper: pair_list(&a)?, lower: pair_list(&b)? })
        }
        "power" => {
            let r = exact(rest)?;
            if r.to_f64().abs() > 1.0 {
                return Err(CliError::Usage("power theta needs |r| <= 1".into()));
            }
            Ok(Theta::bounded(1.0, move |k| r.clone().powi(k as i32)))
        }
        _ => Err(CliError::Usage(format!("unknown theta kind {kind:?}"))),
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

pub fn short(x: &PrecisionReal) -> String {
    x.to_short_string(6)
}
