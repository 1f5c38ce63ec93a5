use clap::{Subcommand, ValueEnum};
use hypcos_core::foxwright::{eval_fox_wright, eval_fox_wright_star, FoxWrightSpec};
use hypcos_core::hypergeom::{eval_pfq, HypergeomParams, SeriesEvaluation};
use hypcos_core::ramanujan::{
    i_c, istar_c, phi, r_c, upsilon_fn, IntegralSpec, KChoice, Method, PhiMethod, RamanujanOptions, RamanujanResult, TailMethod,
};
use hypcos_core::transforms::QuadratureConfig;
use hypcos_core::{PrecisionComplex, PrecisionReal};

use crate::report::{Report, Row};
use crate::values::{exact, exact_list, fmt_f64, pair_list, short, theta};
use crate::{CliError, RunConfig};

#[derive(Subcommand, Debug)]
pub enum EvalKind {
    /// pFq(num; den; z).
    Pfq {
        #[arg(long, default_value = "")]
        num: String,
        #[arg(long, default_value = "")]
        den: String,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Fox-Wright pΨq with `alpha:A` pairs.
    Foxwright {
        #[arg(long, default_value = "")]
        upper: String,
        #[arg(long, default_value = "")]
        lower: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Normalised form (divide by the Gamma prefactor).
        #[arg(long)]
        star: bool,
    },
    /// ∫ x^(υ-1) cos(xy) / (e^(b√x) - 1)^λ dx.
    Ic {
        #[arg(long)]
        upsilon: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long)]
        y: String,
        /// Sum exactly k = 0..K and report the majorant of the rest.
        #[arg(long)]
        k: Option<u64>,
    },
    /// ∫ x^m cos(πnx) / (e^(2π√x) - 1) dx.
    Rc {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: Option<u64>,
    },
    /// Φ(n) = ∫ cos(πnx) / (e^(2π√x) - 1) dx.
    Phi {
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value_t = PhiArg::Series)]
        method: PhiArg,
    },
    /// Υ(n) = 1/(2πn) + ∫ sin(πnx) / (e^(2π√x) - 1) dx, by quadrature.
    Upsilon {
        #[arg(long)]
        n: String,
    },
    /// Σ_k Θ(k)/k! ∫ x^(υ-1) cos(xy) e^(-(λb+ck)√x) dx.
    Istar {
        #[arg(long)]
        upsilon: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long)]
        y: String,
        /// single | pochhammer:L | ratio:a,..|b,.. | gamma:a:A,..|b:B,.. | power:r
        #[arg(long, default_value = "single")]
        theta: String,
        #[arg(long)]
        k: Option<u64>,
        /// Cross-check every inner integral through the ₂F₃ pieces.
        #[arg(long)]
        dual: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhiArg {
    Series,
    Quadrature,
}

fn options(cfg: &RunConfig, k: Option<u64>) -> RamanujanOptions {
    RamanujanOptions {
        digits: cfg.digits,
        tolerance: cfg.tolerance,
        k: k.map_or(KChoice::Auto, KChoice::Fixed),
        verify_dual: false,
    }
}

/// Real inputs give a real series; any imaginary part is rounding residue
/// from the complex Gamma evaluations.
fn complex_text(z: &PrecisionComplex, real_inputs: bool) -> String {
    if real_inputs || z.is_real() {
        z.re().to_decimal_string()
    } else {
        z.to_decimal_string()
    }
}

fn series_row(id: &str, e: &SeriesEvaluation, real_inputs: bool) -> Row {
    Row::new(id)
        .set("value", complex_text(&e.value, real_inputs))
        .set("terms", e.terms_used)
        .set("tail_bound", short(&e.trunc_error))
        .set("cancellation_index", short(&e.cancellation_index))
        .set("working_digits", e.working_digits)
        .set("method", format!("series({:?})", e.class.tag))
}

pub fn ramanujan_row(id: &str, r: &RamanujanResult) -> Row {
    let tail = match r.tail_method {
        TailMethod::None => "none",
        TailMethod::ClosedForm => "closed-form",
        TailMethod::Majorant => "majorant",
    };
    // quadrature values carry f64 accuracy only
    let value = match r.method {
        Method::Quadrature => r.value.to_short_string(17),
        Method::Series(_) => r.value.to_decimal_string(),
    };
    let mut row = Row::new(id)
        .set("value", value)
        .set("terms", r.k_terms)
        .set("tail_bound", short(&r.tail_bound))
        .set("tail_value", short(&r.tail_value))
        .set("tail_method", tail)
        .set("cancellation_index", short(&r.k_cancellation))
        .set("inner_cancellation_max", short(&r.per_k_cancellation_max))
        .set("method", r.method.label());
    if let Some(d) = &r.dual_path_max {
        row = row.set("dual_path_max", short(d));
    }
    row
}

pub fn run(kind: &EvalKind, cfg: &RunConfig) -> Result<Report, CliError> {
    let d = cfg.digits;
    let (name, row) = match kind {
        EvalKind::Pfq { num, den, z } => {
            let lift = |v: Vec<hypcos_core::ExactReal>| v.iter().map(|x| PrecisionComplex::from_exact(x, d)).collect();
            let z = PrecisionComplex::parse(z, d)?;
            let real = z.is_real();
            let params = HypergeomParams::new(lift(exact_list(num)?), lift(exact_list(den)?), z)?;
            ("pfq", series_row("pfq", &eval_pfq(&params, d)?, real))
        }
        EvalKind::Foxwright { upper, lower, z, star } => {
            let lift = |v: Vec<(hypcos_core::ExactReal, f64)>| {
                v.iter().map(|(x, a)| (PrecisionComplex::from_exact(x, d), *a)).collect()
            };
            let z = PrecisionComplex::parse(z, d)?;
            let real = z.is_real();
            let spec = FoxWrightSpec::new(lift(pair_list(upper)?), lift(pair_list(lower)?), z)?;
            let e = if *star { eval_fox_wright_star(&spec, d)? } else { eval_fox_wright(&spec, d)? };
            ("foxwright", series_row(if *star { "foxwright-star" } else { "foxwright" }, &e, real))
        }
        EvalKind::Ic { upsilon, b, lambda, y, k } => {
            let r = i_c(exact(upsilon)?, exact(b)?, exact(lambda)?, exact(y)?, &options(cfg, *k))?;
            ("ic", ramanujan_row("ic", &r))
        }
        EvalKind::Rc { m, n, k } => {
            let r = r_c(*m, &exact(n)?, &options(cfg, *k))?;
            ("rc", ramanujan_row(&format!("rc({m},{n})"), &r))
        }
        EvalKind::Phi { n, method } => {
            let m = match method {
                PhiArg::Series => PhiMethod::Series,
                PhiArg::Quadrature => PhiMethod::Quadrature,
            };
            let r = phi(&exact(n)?, m, &options(cfg, None))?;
            ("phi", ramanujan_row(&format!("phi({n})"), &r))
        }
        EvalKind::Upsilon { n } => {
            let q = upsilon_fn(exact(n)?.to_f64(), &QuadratureConfig::default())?;
            let row = Row::new(format!("upsilon({n})"))
                .set("value", PrecisionReal::from_f64(q.value, 17).to_decimal_string())
                .set("terms", q.blocks)
                .set("tail_bound", fmt_f64(q.error))
                .set("method", "quadrature");
            ("upsilon", row)
        }
        EvalKind::Istar { upsilon, b, c, lambda, y, theta: th, k, dual } => {
            let spec = IntegralSpec::new(exact(upsilon)?, exact(b)?, exact(c)?, exact(lambda)?, exact(y)?, theta(th)?)?;
            let opts = RamanujanOptions { verify_dual: *dual, ..options(cfg, *k) };
            ("istar", ramanujan_row("istar", &istar_c(&spec, &opts)?))
        }
    };
    Ok(Report {
        command: format!("eval {name}"),
        digits: d,
        tolerance: cfg.tolerance_text.clone(),
        rows: vec![row],
        notes: vec![],
    })
}
