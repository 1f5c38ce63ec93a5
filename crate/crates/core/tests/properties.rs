use hypcos_core::foxwright::{convergence_params, eval_fox_wright, FoxWrightSpec};
use hypcos_core::hypergeom::{classify, eval_pfq, HypergeomParams};
use hypcos_core::precision::{
    gauss_legendre_gamma_check, log_gamma, pochhammer, pochhammer_multiplication_check, trig_at_quarter_pi, PochhammerArg,
    TrigKind,
};
use hypcos_core::ramanujan::{i_c, i_c_quadrature, inner_integral_2f3, inner_integral_series, RamanujanOptions};
use hypcos_core::seriestools::{decompose_sum_check, k_tail_bound, TermStream};
use hypcos_core::transforms::{damped_cos_series, fct_quadrature, mellin_cos, DampedCosSpec, QuadratureConfig};
use hypcos_core::{ExactReal, PrecisionComplex, PrecisionReal};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};

const D: u32 = 50;

fn real(x: f64) -> PrecisionReal {
    PrecisionReal::from_f64(x, D)
}

fn cplx(x: f64) -> PrecisionComplex {
    PrecisionComplex::from_f64(x, 0.0, D)
}

fn gamma_f(x: f64) -> Float {
    let g = log_gamma(&cplx(x)).unwrap();
    Complex::with_val(200, g.value().exp_ref()).real().clone()
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

#[test]
fn pochhammer_of_one_is_factorial() {
    for n in 0..=50u64 {
        let p = pochhammer(&PochhammerArg::integer(cplx(1.0), n)).unwrap();
        let f = Float::with_val(400, Float::factorial(n as u32));
        assert_eq!(*p.value().real(), f, "n = {n}");
        assert!(p.value().imag().is_zero());
    }
}

#[test]
fn integer_phases_are_exact() {
    for u in 0..8 {
        for j in 0..8 {
            let c = trig_at_quarter_pi(&real(u as f64), j, TrigKind::Cos);
            let s = trig_at_quarter_pi(&real(u as f64), j, TrigKind::Sin);
            let one = Float::with_val(400, c.value().square_ref()) + Float::with_val(400, s.value().square_ref());
            let err = Float::with_val(400, one - 1u32).abs();
            if j % 2 == 0 {
                // the phase is a multiple of π/2: values are exactly 0 and ±1
                assert!(err.is_zero(), "u={u} j={j}");
            } else {
                // ±√2/2, rounded once
                assert!(err < 1e-50, "u={u} j={j}");
            }
        }
    }
}

#[test]
fn mellin_strip_edges_are_rejected() {
    assert!(mellin_cos(&real(0.0), &real(1.0)).is_err());
    assert!(mellin_cos(&real(1.0), &real(1.0)).is_err());
    assert!(mellin_cos(&real(0.5), &real(1.0)).is_ok());
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn pochhammer_recurrence(lam in -7.5f64..7.5, n in 0u64..40) {
        let a = pochhammer(&PochhammerArg::integer(cplx(lam), n)).unwrap();
        let b = pochhammer(&PochhammerArg::integer(cplx(lam), n + 1)).unwrap();
        let expect = Complex::with_val(200, a.value() * (Float::with_val(200, lam) + n));
        let diff = Complex::with_val(200, b.value() - &expect).abs().real().to_f64();
        prop_assert!(diff <= 1e-45 * expect.abs().real().to_f64().max(1.0));
    }

    #[test]
    fn multiplication_theorems(re in 0.1f64..6.0, im in -3.0f64..3.0, m in 1u32..6, n in 0u64..25) {
        let z = PrecisionComplex::from_f64(re, im, D);
        prop_assert!(pochhammer_multiplication_check(&z, m, n).unwrap().to_f64() < 1e-45);
        prop_assert!(gauss_legendre_gamma_check(m, &z).unwrap().to_f64() < 1e-45);
    }

    #[test]
    fn binomial_reduction(alpha in -4.0f64..4.0, z in -0.9f64..0.9) {
        let e = eval_pfq(&HypergeomParams::real(&[alpha], &[], z, D).unwrap(), D).unwrap();
        let expect = Float::with_val(200, 1 - Float::with_val(200, z)).pow(Float::with_val(200, -alpha));
        let diff = Float::with_val(200, e.value.value().real() - &expect).abs().to_f64();
        prop_assert!(diff <= e.trunc_error.to_f64() + 1e-42 * expect.to_f64().abs().max(1.0));
    }

    #[test]
    fn cosine_and_sine_reductions(z in -10.0f64..10.0) {
        let w = -z * z / 4.0;
        let c = eval_pfq(&HypergeomParams::real(&[], &[0.5], w, D).unwrap(), D).unwrap();
        let s = eval_pfq(&HypergeomParams::real(&[], &[1.5], w, D).unwrap(), D).unwrap();
        // the engine sees the rounded w; both sides are even/odd in z, so compare at 2√(−w)
        let zz = Float::with_val(200, -Float::with_val(200, w)).sqrt() * 2u32;
        prop_assert!(Float::with_val(200, c.value.value().real() - zz.clone().cos()).abs() < 1e-15);
        let sin = Float::with_val(200, s.value.value().real() * &zz);
        prop_assert!(Float::with_val(200, sin - zz.sin()).abs() < 1e-15);
    }

    #[test]
    fn term_ratio_recurrence(a1 in 0.2f64..4.0, b1 in 0.2f64..4.0, b2 in 0.2f64..4.0, z in -3.0f64..3.0, n in 1u64..30) {
        // direct t_n = (a)_n z^n / ((b1)_n (b2)_n n!) against the ratio recurrence
        let p = |lam: f64, k: u64| pochhammer(&PochhammerArg::integer(cplx(lam), k)).unwrap().value().real().clone();
        let prec = 300;
        let zf = Float::with_val(prec, z);
        let direct = |k: u64| {
            Float::with_val(prec, p(a1, k) * Float::with_val(prec, zf.clone().pow(k as u32)))
                / (p(b1, k) * p(b2, k) * Float::with_val(prec, Float::factorial(k as u32)))
        };
        let mut t = Float::with_val(prec, 1);
        for k in 0..n {
            t *= Float::with_val(prec, Float::with_val(prec, a1) + k) * &zf;
            t /= Float::with_val(prec, Float::with_val(prec, b1) + k) * Float::with_val(prec, Float::with_val(prec, b2) + k) * (k + 1);
        }
        let d = direct(n);
        let diff = Float::with_val(prec, &t - &d).abs();
        prop_assert!(diff <= Float::with_val(prec, d.abs_ref()) * 1e-48 + 1e-300);
    }

    #[test]
    fn classify_is_total(p in 0usize..4, q in 0usize..4, z in -3.0f64..3.0) {
        let num: Vec<f64> = (0..p).map(|i| 0.5 + i as f64).collect();
        let den: Vec<f64> = (0..q).map(|i| 1.5 + i as f64).collect();
        let params = HypergeomParams::real(&num, &den, z, D).unwrap();
        let _ = classify(&params).tag;
    }

    #[test]
    fn sigma_is_one_minus_delta(a in 0.1f64..3.0, b in 0.1f64..3.0, c in 0.1f64..3.0, z in -2.0f64..2.0) {
        let spec = FoxWrightSpec::real(&[(1.0, a)], &[(1.5, b), (2.0, c)], z, D).unwrap();
        let cp = convergence_params(&spec);
        prop_assert_eq!(cp.sigma_star, 1.0 - cp.delta_star);
    }

    #[test]
    fn unit_fox_wright_is_scaled_pfq(a in 0.3f64..3.0, b in 0.3f64..3.0, c in 0.3f64..3.0, z in -4.0f64..4.0) {
        let fw = eval_fox_wright(&FoxWrightSpec::real(&[(a, 1.0)], &[(b, 1.0), (c, 1.0)], z, D).unwrap(), D).unwrap();
        let pf = eval_pfq(&HypergeomParams::real(&[a], &[b, c], z, D).unwrap(), D).unwrap();
        let ratio = gamma_f(a) / (gamma_f(b) * gamma_f(c));
        let expect = Float::with_val(200, pf.value.value().real() * &ratio);
        let diff = Float::with_val(200, fw.value.value().real() - &expect).abs().to_f64();
        prop_assert!(diff <= 1e-42 * expect.to_f64().abs().max(1.0));
    }

    #[test]
    fn log_gamma_shift(re in 0.1f64..20.0, im in -5.0f64..5.0) {
        let z = PrecisionComplex::from_f64(re, im, D);
        let z1 = PrecisionComplex::from_complex(Complex::with_val(200, z.value() + 1u32), D);
        let d = Complex::with_val(200, log_gamma(&z1).unwrap().value() - log_gamma(&z).unwrap().value());
        let lz = Complex::with_val(200, z.value().ln_ref());
        // equal modulo 2πi
        let diff = Complex::with_val(200, &d - &lz);
        let turns = (diff.imag().to_f64() / (2.0 * std::f64::consts::PI)).round();
        prop_assert!(diff.real().to_f64().abs() < 1e-45);
        prop_assert!((diff.imag().to_f64() - turns * 2.0 * std::f64::consts::PI).abs() < 1e-40);
    }

    #[test]
    fn decomposition_is_a_rearrangement(rho in 0.05f64..0.9, n in 1u64..6, count in 1u64..60, phase in 0.0f64..6.0) {
        let stream = TermStream::new(move |k| {
            let t = rho.powi(k as i32) * (phase * k as f64).cos();
            PrecisionComplex::from_f64(t, 0.0, D)
        }).with_decay(rho);
        let c = decompose_sum_check(&stream, n, count, D).unwrap();
        prop_assert!(c.residual.is_zero());
        prop_assert!(c.working_residual.to_f64() < 1e-47);
    }

    #[test]
    fn damped_series_matches_quadrature(mu in -0.9f64..3.0, a in 0.5f64..10.0, y in 0.5f64..10.0) {
        let spec = DampedCosSpec::new(real(mu), real(a), real(0.5), real(y)).unwrap();
        let s = damped_cos_series(&spec, D).unwrap().value.value().real().to_f64();
        let q = fct_quadrature(&|x: f64| x.powf(mu) * (-a * x.sqrt()).exp(), y, &QuadratureConfig::default()).unwrap();
        prop_assert!((s - q.value).abs() <= q.error + 1e-8 * s.abs().max(1e-3), "{} {}", s, q.value);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn quadrature_is_linear(a in 0.5f64..5.0, b in 0.5f64..5.0, y in 0.5f64..8.0) {
        let cfg = QuadratureConfig::default();
        let g1 = move |x: f64| (-a * x.sqrt()).exp();
        let g2 = move |x: f64| x * (-b * x.sqrt()).exp();
        let s = fct_quadrature(&|x| g1(x) + g2(x), y, &cfg).unwrap().value;
        let p = fct_quadrature(&g1, y, &cfg).unwrap().value + fct_quadrature(&g2, y, &cfg).unwrap().value;
        prop_assert!((s - p).abs() < 1e-11);
    }

    #[test]
    fn k_tail_bound_dominates(u in 0.55f64..3.0, b in 0.5f64..4.0, c in 0.5f64..4.0, lam in 0.5f64..2.0, kk in 2u64..12) {
        // |Θ| ≤ 1 with Θ(k)/k!; brute force over 10K further terms of 2Γ(2υ)a^(-2υ)/k!
        let theta = PrecisionReal::from_float(Float::with_val(200, 1) / Float::with_val(200, Float::factorial((kk + 1) as u32)), D);
        let bound = k_tail_bound(&real(u), &real(b), &real(c), &real(lam), &theta, kk).unwrap().to_f64();
        let g2u = gamma_f(2.0 * u).to_f64();
        let mut brute = 0.0;
        let mut fact = (1..=kk).fold(1.0f64, |f, i| f * i as f64);
        for k in kk + 1..=kk + 10 * kk {
            fact *= k as f64;
            brute += 2.0 * g2u * (lam * b + c * k as f64).powf(-2.0 * u) / fact;
        }
        prop_assert!(brute <= bound);
    }

    #[test]
    fn dual_path_equality(u in 0.5f64..3.0, a in 1.0f64..10.0, y in 1.0f64..10.0) {
        let s = inner_integral_series(&real(u), &real(a), &real(y), D).unwrap();
        let f = inner_integral_2f3(&real(u), &real(a), &real(y), D).unwrap();
        let diff = (&s.value - &f.value).abs().to_f64();
        prop_assert!(diff < 1e-40, "diff {diff:e}");
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn i_c_matches_quadrature(u in 0.55f64..3.0, b in 1.0f64..8.0, lam_frac in 0.0f64..1.0, y in 1.0f64..8.0) {
        // the integral converges at 0 only for λ < 2υ; stay clear of that edge
        let lam_hi = (2.0 * u - 0.5).min(3.0);
        prop_assume!(lam_hi > 0.5);
        let lam = 0.5 + lam_frac * (lam_hi - 0.5);
        let e = |x: f64| ExactReal::Binary(Float::with_val(53, x));
        let r = i_c(e(u), e(b), e(lam), e(y), &RamanujanOptions::with_digits(30)).unwrap();
        let q = i_c_quadrature(u, b, lam, y, &QuadratureConfig::default()).unwrap();
        let diff = (r.value.to_f64() - q.value).abs();
        prop_assert!(diff <= r.tail_bound.to_f64() + 1e-8, "{} vs {}", r.value.to_f64(), q.value);
    }
}
