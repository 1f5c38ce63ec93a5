//! Acceptance suite: one PASS/FAIL line per criterion. Values computed by the
//! CLI are compared against closed forms and direct sums evaluated here with
//! MPFR, independently of the library's own catalogs.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use hypcos_core::foxwright::{eval_fox_wright, FoxWrightSpec};
use hypcos_core::hypergeom::{eval_pfq, lommel, HypergeomParams};
use hypcos_core::precision::{gauss_legendre_gamma_check, pochhammer_multiplication_check};
use hypcos_core::ramanujan::{inner_integral_2f3, inner_integral_series};
use hypcos_core::seriestools::{decompose_sum_check, TermStream};
use hypcos_core::{PrecisionComplex, PrecisionReal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde_json::Value;

const DIGITS: u32 = 50;
const CLOSED_FORM_SERIES_TOL: f64 = 1e-10;
const CLOSED_FORM_QUAD_TOL: f64 = 1e-8;
const CLOSED_FORM_BUDGET: Duration = Duration::from_secs(120);
const DUAL_PATH_TOL: f64 = 1e-40;
const DUAL_PATH_CASES: usize = 100;
const ORACLE_EXTRA_TOL: f64 = 1e-8;
const ORACLE_CASES: usize = 30;
const IDENTITY_TOL: f64 = 1e-6;
const RECIPROCITY_TOL: f64 = 1e-8;
const REDUCTION_CASES: usize = 200;
/// 1e-(digits − 8)
const REDUCTION_TOL: f64 = 1e-42;
const INFRA_CASES: usize = 50;
const INFRA_TOL: f64 = 1e-45;

const P: u32 = 320;

type Check = Result<String, String>;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hypcos"));
    c.env_remove("HYPCOS_DIGITS");
    c
}

fn cli_json(args: &[&str]) -> Result<(Value, i32, Vec<u8>), String> {
    let out = bin()
        .args(args)
        .args(["--digits", &DIGITS.to_string(), "--output", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    let v = serde_json::from_slice(&out.stdout)
        .map_err(|e| format!("bad json from {args:?}: {e}; {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok((v, out.status.code().unwrap_or(-1), out.stdout))
}

fn rows(v: &Value) -> &[Value] {
    v["rows"].as_array().map(Vec::as_slice).unwrap_or(&[])
}

fn field<'a>(row: &'a Value, key: &str) -> Result<&'a str, String> {
    row[key].as_str().ok_or_else(|| format!("row {} has no {key}", row["id"]))
}

fn big(row: &Value, key: &str) -> Result<Float, String> {
    let s = field(row, key)?;
    Float::parse(s).map(|p| Float::with_val(P, p)).map_err(|e| format!("{key} = {s:?}: {e}"))
}

fn num(row: &Value, key: &str) -> Result<f64, String> {
    let s = field(row, key)?;
    s.parse().map_err(|e| format!("{key} = {s:?}: {e}"))
}

fn f(x: f64) -> Float {
    Float::with_val(P, x)
}

fn pi() -> Float {
    Float::with_val(P, Constant::Pi)
}

fn sqrt(n: u32) -> Float {
    Float::with_val(P, n).sqrt()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn closed_form_values() -> Vec<(&'static str, Float)> {
    let p = pi();
    let p2 = Float::with_val(P, p.square_ref());
    vec![
        ("rc-1-1/2", (13 - Float::with_val(P, &p * 4u32)) / Float::with_val(P, &p2 * 8u32)),
        ("rc-1-2", (f(0.5) - Float::with_val(P, 3 / &p) + Float::with_val(P, 5 / &p2)) / 64u32),
        ("rc-2-2", (f(1.0) - Float::with_val(P, 5 / &p) + Float::with_val(P, 5 / &p2)) / 256u32),
        ("phi-1", (2 - sqrt(2)) / 8u32),
        ("phi-2", f(1.0) / 16u32),
        ("phi-4", (3 - sqrt(2)) / 32u32),
        ("phi-6", (13 - sqrt(3) * 4u32) / 144u32),
        ("phi-1/2", 1 / Float::with_val(P, &p * 4u32)),
        ("phi-2/5", (8 - sqrt(5) * 3u32) / 16u32),
    ]
}

fn identity_values() -> Vec<(&'static str, Float)> {
    let p = pi();
    let p2 = Float::with_val(P, p.square_ref());
    vec![
        ("m1-n1/2", (Float::with_val(P, &p * 4u32) - 13) / 32u32),
        ("m1-n2", Float::with_val(P, &p2 / 16u32) * (Float::with_val(P, 3 / &p) - 0.5 - Float::with_val(P, 5 / &p2))),
        ("m2-n2", Float::with_val(P, &p2 / 60u32) * (Float::with_val(P, 5 / &p) - Float::with_val(P, 5 / &p2) - 1)),
        ("m0-n1", (sqrt(2) - 1) / 4u32),
        ("m0-n2", f(0.25)),
        ("m0-n4", (sqrt(2) * 3u32 - 2) / 4u32),
        ("m0-n6", (sqrt(3) * 13u32 - 12) / 12u32),
        ("m0-n1/2", 1 / Float::with_val(P, &p * 8u32)),
        ("m0-n2/5", (sqrt(5) * 8u32 - 15) / 100u32),
    ]
}

fn closed_forms() -> Check {
    let t0 = Instant::now();
    let (v, code, _) = cli_json(&["verify", "closed-forms"])?;
    let elapsed = t0.elapsed();
    let rs = rows(&v);
    ensure(code == 0, || format!("exit code {code}"))?;
    ensure(rs.len() == 9, || format!("{} rows", rs.len()))?;
    let (mut worst_s, mut worst_q) = (0f64, 0f64);
    for (id, exact) in closed_form_values() {
        let row = rs.iter().find(|r| r["id"] == id).ok_or(format!("missing {id}"))?;
        let s = Float::with_val(P, big(row, "value")? - &exact).abs().to_f64();
        let q = (num(row, "quadrature")? - exact.to_f64()).abs();
        ensure(s < CLOSED_FORM_SERIES_TOL, || format!("{id}: series residual {s:e}"))?;
        ensure(q < CLOSED_FORM_QUAD_TOL, || format!("{id}: quadrature residual {q:e}"))?;
        worst_s = worst_s.max(s);
        worst_q = worst_q.max(q);
    }
    ensure(elapsed < CLOSED_FORM_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("9 values, max series residual {worst_s:.1e}, max quadrature residual {worst_q:.1e}, {:.1}s", elapsed.as_secs_f64()))
}

fn dual_path() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1_0002);
    let mut worst = 0f64;
    for _ in 0..DUAL_PATH_CASES {
        // υ ∈ (0.5, 3]
        let u = 3.0 - 2.5 * rng.gen::<f64>();
        let a = rng.gen_range(1.0..=10.0);
        let y = rng.gen_range(1.0..=10.0);
        let r = |x: f64| PrecisionReal::from_f64(x, DIGITS);
        let s = inner_integral_series(&r(u), &r(a), &r(y), DIGITS).map_err(|e| format!("series({u},{a},{y}): {e}"))?;
        let t = inner_integral_2f3(&r(u), &r(a), &r(y), DIGITS).map_err(|e| format!("2f3({u},{a},{y}): {e}"))?;
        let d = (&s.value - &t.value).abs().to_f64();
        ensure(d < DUAL_PATH_TOL, || format!("(υ, a, y) = ({u}, {a}, {y}): |diff| = {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("{DUAL_PATH_CASES} cases, max |series − 2f3| {worst:.1e}"))
}

fn oracle() -> Check {
    let (v, _, _) = cli_json(&["verify", "oracle", "--seed", "20261014"])?;
    let rs = rows(&v);
    ensure(rs.len() == ORACLE_CASES, || format!("{} rows", rs.len()))?;
    let mut worst = 0f64;
    for row in rs {
        if let Some(e) = row.get("error") {
            return Err(format!("{}: {e}", row["id"]));
        }
        let u = num(row, "upsilon")?;
        let lam = num(row, "lambda")?;
        ensure(u > 0.5 && u <= 3.0 && (0.5..=3.0).contains(&lam) && lam < 2.0 * u, || format!("{} out of range", row["id"]))?;
        let d = num(row, "residual")?;
        let allowed = num(row, "tail_bound")? + ORACLE_EXTRA_TOL;
        ensure(d <= allowed, || format!("{}: {d:e} > {allowed:e}", row["id"]))?;
        worst = worst.max(d);
    }
    Ok(format!("{ORACLE_CASES} i_c instances, max |series − quadrature| {worst:.1e}"))
}

fn identities() -> Check {
    let (v, code, _) = cli_json(&["verify", "identities"])?;
    ensure(code == 0, || format!("exit code {code}"))?;
    let rs = rows(&v);
    let mut worst = 0f64;
    for (id, rhs) in identity_values() {
        let row = rs.iter().find(|r| r["id"] == id).ok_or(format!("missing {id}"))?;
        ensure(row["grouped"] == true, || format!("{id} not grouped"))?;
        let d = Float::with_val(P, big(row, "value")? - &rhs).abs().to_f64();
        ensure(d < IDENTITY_TOL, || format!("{id}: residual {d:e}"))?;
        let tb = num(row, "tail_bound")?;
        ensure(tb.is_finite() && tb < IDENTITY_TOL, || format!("{id}: tail bound {tb:e}"))?;
        worst = worst.max(d);
    }
    let sep = rs.iter().find(|r| r["grouped"] == false).ok_or("no separated-ordering row")?;
    let growth = num(sep, "growth")?;
    ensure(sep["diverges"] == true && growth > 1.5, || format!("separated growth {growth}"))?;
    Ok(format!("9 grouped identities, max residual {worst:.1e}; separated {} grows by {growth:.2}", sep["id"].as_str().unwrap_or("?")))
}

fn reciprocity() -> Check {
    let (v, code, _) = cli_json(&["verify", "reciprocity", "--n", "1/2,1,2"])?;
    ensure(code == 0, || format!("exit code {code}"))?;
    let rs = rows(&v);
    let mut worst = 0f64;
    let mut count = 0;
    for n in ["1/2", "1", "2"] {
        for rel in ["phi-from-upsilon", "upsilon-from-phi"] {
            let id = format!("{rel} n={n}");
            let row = rs.iter().find(|r| r["id"] == id.as_str()).ok_or(format!("missing {id}"))?;
            let d = num(row, "residual")?;
            ensure(d < RECIPROCITY_TOL, || format!("{id}: {d:e}"))?;
            worst = worst.max(d);
            count += 1;
        }
    }
    let up = rs.iter().find(|r| r["id"].as_str().is_some_and(|s| s.starts_with("upsilon(1)"))).ok_or("missing upsilon(1)")?;
    let d1 = (num(up, "value")? - 2f64.sqrt() / 8.0).abs();
    ensure(d1 < RECIPROCITY_TOL, || format!("upsilon(1) off by {d1:e}"))?;
    Ok(format!("{count} relations, max residual {worst:.1e}; |Υ(1) − √2/8| = {d1:.1e}"))
}

fn real_part(c: &PrecisionComplex) -> Float {
    Float::with_val(P, c.value().real())
}

fn close(got: &Float, want: &Float, allowed: f64) -> Result<f64, f64> {
    let d = Float::with_val(P, got - want).abs().to_f64();
    let scaled = d / want.to_f64().abs().max(1.0);
    if scaled <= allowed {
        Ok(scaled)
    } else {
        Err(scaled)
    }
}

/// z^(μ+1) Σ_k (−z²)^k / ∏_{i≤k} ((μ+2i+1)² − ν²)
fn lommel_direct(mu: f64, nu: f64, z: f64) -> Float {
    let z2 = -f(z) * f(z);
    let mut term = Float::with_val(P, 1);
    let mut sum = Float::with_val(P, 0);
    for k in 0..2000u32 {
        let a = Float::with_val(P, f(mu) + 2 * k + 1);
        term /= a.square() - f(nu) * f(nu);
        sum += &term;
        if term.clone().abs() < 1e-90 * sum.to_f64().abs().max(1e-300) {
            break;
        }
        term *= &z2;
    }
    sum * f(z).pow(f(mu) + 1)
}

/// Σ_k Γ(a+k)/(Γ(b+k)Γ(c+k)) · z^k/k!
fn fox_wright_direct(a: f64, b: f64, c: f64, z: f64) -> Float {
    let g = |x: Float| x.gamma();
    let mut sum = Float::with_val(P, 0);
    let mut zk = Float::with_val(P, 1);
    for k in 0..3000u32 {
        let t = g(f(a) + k) / (g(f(b) + k) * g(f(c) + k)) * &zk / Float::with_val(P, Float::factorial(k));
        sum += &t;
        if k > 10 && t.abs() < 1e-90 {
            break;
        }
        zk *= f(z);
    }
    sum
}

fn reductions() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ed_0006);
    let d = DIGITS;
    let mut worst = [0f64; 5];
    let fail = |what: &str, args: String, e: String| format!("{what}({args}): {e}");
    for _ in 0..REDUCTION_CASES {
        // binomial: 1F0(α;;z) = (1 − z)^(−α)
        let (alpha, z) = (rng.gen_range(-4.0..4.0), rng.gen_range(-0.9..0.9));
        let e = eval_pfq(&HypergeomParams::real(&[alpha], &[], z, d).unwrap(), d).map_err(|e| fail("binomial", format!("{alpha},{z}"), e.to_string()))?;
        let want = Float::with_val(P, 1 - f(z)).pow(-f(alpha));
        worst[0] = worst[0].max(close(&real_part(&e.value), &want, REDUCTION_TOL).map_err(|x| fail("binomial", format!("{alpha},{z}"), format!("{x:e}")))?);

        // cos w = 0F1(; 1/2; −w²/4), sin w = w 0F1(; 3/2; −w²/4) with w = 2√t
        let t: f64 = rng.gen_range(0.0..25.0);
        let w = f(t).sqrt() * 2u32;
        let c = eval_pfq(&HypergeomParams::real(&[], &[0.5], -t, d).unwrap(), d).map_err(|e| fail("cos", t.to_string(), e.to_string()))?;
        worst[1] = worst[1].max(close(&real_part(&c.value), &w.clone().cos(), REDUCTION_TOL).map_err(|x| fail("cos", t.to_string(), format!("{x:e}")))?);
        let s = eval_pfq(&HypergeomParams::real(&[], &[1.5], -t, d).unwrap(), d).map_err(|e| fail("sin", t.to_string(), e.to_string()))?;
        worst[2] = worst[2].max(close(&(real_part(&s.value) * &w), &w.clone().sin(), REDUCTION_TOL).map_err(|x| fail("sin", t.to_string(), format!("{x:e}")))?);

        // Lommel s_{μ,ν}(z)
        let (mu, nu, zz) = (rng.gen_range(0.0..3.0), rng.gen_range(-0.9..0.9), rng.gen_range(0.1..8.0));
        let cz = |x: f64| PrecisionComplex::from_f64(x, 0.0, d);
        let l = lommel(&cz(mu), &cz(nu), &cz(zz), d).map_err(|e| fail("lommel", format!("{mu},{nu},{zz}"), e.to_string()))?;
        worst[3] = worst[3].max(close(&real_part(&l.value), &lommel_direct(mu, nu, zz), REDUCTION_TOL).map_err(|x| fail("lommel", format!("{mu},{nu},{zz}"), format!("{x:e}")))?);

        // unit-coefficient Fox-Wright 1Ψ2
        let (a, b, cc, zf) = (rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0), rng.gen_range(-4.0..4.0));
        let fw = eval_fox_wright(&FoxWrightSpec::real(&[(a, 1.0)], &[(b, 1.0), (cc, 1.0)], zf, d).unwrap(), d)
            .map_err(|e| fail("fox-wright", format!("{a},{b},{cc},{zf}"), e.to_string()))?;
        worst[4] = worst[4].max(close(&real_part(&fw.value), &fox_wright_direct(a, b, cc, zf), REDUCTION_TOL).map_err(|x| fail("fox-wright", format!("{a},{b},{cc},{zf}"), format!("{x:e}")))?);
    }
    Ok(format!(
        "{REDUCTION_CASES} cases each; max scaled error binomial {:.1e}, cos {:.1e}, sin {:.1e}, lommel {:.1e}, fox-wright {:.1e}",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    ))
}

fn infrastructure() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1af_0007);
    for _ in 0..INFRA_CASES {
        let rho: f64 = rng.gen_range(0.05..0.9);
        let phase: f64 = rng.gen_range(0.0..6.0);
        let count = rng.gen_range(1..60u64);
        let stream = TermStream::new(move |k| PrecisionComplex::from_f64(rho.powi(k as i32) * (phase * k as f64).cos(), 0.0, DIGITS)).with_decay(rho);
        let c = decompose_sum_check(&stream, 4, count, DIGITS).map_err(|e| e.to_string())?;
        ensure(c.residual.is_zero(), || format!("decomposition residual {} (rho {rho}, count {count})", c.residual))?;
    }
    let (mut wp, mut wg) = (0f64, 0f64);
    for _ in 0..INFRA_CASES {
        let z = PrecisionComplex::from_f64(rng.gen_range(0.1..6.0), rng.gen_range(-3.0..3.0), DIGITS);
        let m = rng.gen_range(1..6u32);
        let n = rng.gen_range(0..25u64);
        let p = pochhammer_multiplication_check(&z, m, n).map_err(|e| e.to_string())?.to_f64();
        let g = gauss_legendre_gamma_check(m, &z).map_err(|e| e.to_string())?.to_f64();
        ensure(p < INFRA_TOL && g < INFRA_TOL, || format!("z = {z}, m = {m}, n = {n}: {p:e}, {g:e}"))?;
        wp = wp.max(p);
        wg = wg.max(g);
    }
    Ok(format!("{INFRA_CASES} streams exact; max Pochhammer multiplication {wp:.1e}, Gauss-Legendre {wg:.1e}"))
}

fn determinism() -> Check {
    let (_, c1, a) = cli_json(&["verify", "all", "--jobs", "1"])?;
    let (_, c8, b) = cli_json(&["verify", "all", "--jobs", "8"])?;
    ensure(c1 == 0 && c8 == 0, || format!("exit codes {c1}, {c8}"))?;
    ensure(a == b, || "JSON differs between --jobs 1 and --jobs 8".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("closed-form reproduction", closed_forms),
        ("dual-path equality", dual_path),
        ("oracle equivalence", oracle),
        ("summation identities", identities),
        ("reciprocity", reciprocity),
        ("hypergeometric reductions", reductions),
        ("identity infrastructure", infrastructure),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS [{}] {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
