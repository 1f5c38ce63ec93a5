use rug::float::Constant;
use rug::Float;

use super::{bits_for_digits, PrecisionReal};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    Cos,
    Sin,
}

/// cos/sin of θ + jπ/4 for θ = υπ/2 and any integer j.
///
/// When 2υ is an integer θ is itself a multiple of π/4, and every phase is
/// read from the exact table {0, ±1, ±√2/2}; the zeros are exact so callers
/// can skip vanishing pieces without floating cancellation.
#[derive(Clone, Debug)]
pub struct QuarterPhase {
    prec: u32,
    /// Some(t) when θ = tπ/4 exactly.
    octant: Option<i64>,
    cos_theta: Float,
    sin_theta: Float,
    half_sqrt2: Float,
}

fn table(k: i64, kind: TrigKind) -> i8 {
    // cos(kπ/4) and sin(kπ/4) in units where ±2 is ±1 and ±1 is ±√2/2.
    const COS: [i8; 8] = [2, 1, 0, -1, -2, -1, 0, 1];
    const SIN: [i8; 8] = [0, 1, 2, 1, 0, -1, -2, -1];
    let i = k.rem_euclid(8) as usize;
    match kind {
        TrigKind::Cos => COS[i],
        TrigKind::Sin => SIN[i],
    }
}

impl QuarterPhase {
    pub fn new(upsilon: &Float, prec: u32) -> Self {
        let half_sqrt2 = Float::with_val(prec, 2).sqrt() / 2u32;
        let twice = Float::with_val(prec + 8, upsilon * 2u32);
        if twice.is_integer() {
            let t = twice.to_integer().map(|i| i.mod_u(8) as i64).unwrap_or(0);
            return Self {
                prec,
                octant: Some(t),
                cos_theta: Float::with_val(prec, 0),
                sin_theta: Float::with_val(prec, 0),
                half_sqrt2,
            };
        }
        let wp = prec + 16 + upsilon.to_f64().abs().max(1.0).log2().ceil() as u32;
        let theta = Float::with_val(wp, upsilon * Float::with_val(wp, Constant::Pi)) / 2u32;
        let (s, c) = theta.sin_cos(Float::new(wp));
        Self {
            prec,
            octant: None,
            cos_theta: Float::with_val(prec, c),
            sin_theta: Float::with_val(prec, s),
            half_sqrt2,
        }
    }

    fn unit(&self, code: i8) -> Float {
        match code {
            2 => Float::with_val(self.prec, 1),
            -2 => Float::with_val(self.prec, -1),
            1 => self.half_sqrt2.clone(),
            -1 => Float::with_val(self.prec, -&self.half_sqrt2),
            _ => Float::with_val(self.prec, 0),
        }
    }

    /// True when the phase at j is exactly zero.
    pub fn is_zero(&self, j: i64, kind: TrigKind) -> bool {
        match self.octant {
            Some(t) => table(t + j, kind) == 0,
            None => false,
        }
    }

    pub fn eval(&self, j: i64, kind: TrigKind) -> Float {
        if let Some(t) = self.octant {
            return self.unit(table(t + j, kind));
        }
        let cj = self.unit(table(j, TrigKind::Cos));
        let sj = self.unit(table(j, TrigKind::Sin));
        match kind {
            // cos(θ+φ) = cos θ cos φ - sin θ sin φ
            TrigKind::Cos => Float::with_val(self.prec, &self.cos_theta * &cj) - &self.sin_theta * sj,
            // sin(θ+φ) = sin θ cos φ + cos θ sin φ
            TrigKind::Sin => Float::with_val(self.prec, &self.sin_theta * &cj) + &self.cos_theta * sj,
        }
    }

    pub fn cos(&self, j: i64) -> Float {
        self.eval(j, TrigKind::Cos)
    }

    pub fn sin(&self, j: i64) -> Float {
        self.eval(j, TrigKind::Sin)
    }
}

/// cos or sin of υπ/2 + jπ/4.
pub fn trig_at_quarter_pi(upsilon: &PrecisionReal, j: i64, kind: TrigKind) -> PrecisionReal {
    let prec = bits_for_digits(upsilon.digits());
    let phase = QuarterPhase::new(upsilon.value(), prec);
    PrecisionReal::from_float(phase.eval(j, kind), upsilon.digits())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> PrecisionReal {
        PrecisionReal::from_f64(x, 50)
    }

    #[test]
    fn examples() {
        assert!(trig_at_quarter_pi(&r(1.0), 0, TrigKind::Cos).is_zero());
        let h = trig_at_quarter_pi(&r(0.0), 1, TrigKind::Cos);
        assert!((h.to_f64() - 0.5f64.sqrt()).abs() < 1e-16);
        assert_eq!(trig_at_quarter_pi(&r(2.0), 2, TrigKind::Sin).to_f64(), -1.0);
    }

    #[test]
    fn integer_orders_are_exact() {
        for u in -6..=6 {
            for j in 0..4 {
                let c = trig_at_quarter_pi(&r(u as f64), j, TrigKind::Cos);
                let s = trig_at_quarter_pi(&r(u as f64), j, TrigKind::Sin);
                let sum = Float::with_val(400, c.value().square_ref()) + s.value().clone().square();
                let err = (sum - 1u32).abs().to_f64();
                assert!(err < 1e-50, "{u} {j}: {err}");
                // one of the two is exactly 0 or they are equal in magnitude
                let ca = c.value().clone().abs();
                let sa = s.value().clone().abs();
                assert!(c.is_zero() || s.is_zero() || ca == sa);
            }
        }
    }

    #[test]
    fn generic_orders_match_direct_evaluation() {
        let prec = 200;
        for &u in &[0.3, 1.37, 2.9, -0.8] {
            let phase = QuarterPhase::new(&Float::with_val(prec, u), prec);
            for j in 0..8 {
                let arg = (Float::with_val(prec, u) * 2u32 + j as i32) * Float::with_val(prec, Constant::Pi) / 4u32;
                let d = Float::with_val(prec, phase.cos(j) - arg.clone().cos()).abs();
                assert!(d.to_f64() < 1e-55);
                let d = Float::with_val(prec, phase.sin(j) - arg.sin()).abs();
                assert!(d.to_f64() < 1e-55);
            }
        }
    }
}
