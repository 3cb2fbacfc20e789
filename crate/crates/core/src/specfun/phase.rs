use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::pair::{PhysicalParams, Regime, ScaledPair};
use super::whittaker::WhittakerM;
use crate::error::{Error, Result};

/// Scaled argument at which the phase is anchored.
const ANCHOR: f64 = 1e-6;
const MAX_INCREMENT: f64 = 0.1;

/// `|Γ(1 + iν)|² = πν / sinh(πν)`.
pub fn gamma_abs_sq(nu: f64) -> f64 {
    let x = PI * nu.abs();
    if x < 1e-8 {
        return 1.0 - x * x / 6.0;
    }
    // 2x e^{-x} / (1 - e^{-2x}) avoids overflow of sinh.
    2.0 * x * (-x).exp() / (-(-2.0 * x).exp_m1())
}

/// Continuous argument of `M_+(x)` on the positive axis (`β² > 1/4`).
///
/// `M_+(x) = (2mx)^{1/2+iν} E(2mx)`, so the phase is `ν log(2mx)` plus the
/// argument of the envelope, which is followed continuously from the anchor.
#[derive(Debug, Clone)]
pub struct PhaseFunction {
    params: PhysicalParams,
    m: WhittakerM,
}

impl PhaseFunction {
    pub fn new(params: PhysicalParams) -> Result<Self> {
        if params.regime != Regime::SuperQuarter {
            return Err(Error::Regime { expected: "SuperQuarter" });
        }
        let pair = ScaledPair::new(params);
        let m = pair.first_order().expect("generic pair").clone();
        Ok(Self { params, m })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// `Θ(x)`.
    pub fn theta(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("phase needs x > 0, got {x}")));
        }
        let s = 2.0 * self.params.mf();
        let anchor = self.m.envelope(C64::new(ANCHOR, 0.0)).0.arg();
        Ok(self.params.nu * (s * x).ln() + anchor + self.envelope_increment(ANCHOR, s * x)?)
    }

    /// `Θ(x2) - Θ(x1)` without passing through the anchor.
    pub fn increment(&self, x1: f64, x2: f64) -> Result<f64> {
        if !(x1 > 0.0 && x2 > 0.0) {
            return Err(Error::Domain("phase increment needs positive arguments".into()));
        }
        let s = 2.0 * self.params.mf();
        Ok(self.params.nu * (x2 / x1).ln() + self.envelope_increment(s * x1, s * x2)?)
    }

    /// `Θ'(x) = Im(M_+'/M_+)`.
    pub fn derivative(&self, x: f64) -> f64 {
        let s = 2.0 * self.params.mf();
        let (e, de) = self.m.envelope(C64::new(s * x, 0.0));
        self.params.nu / x + s * (de / e).im
    }

    /// Change of `arg E` along the real segment from `a` to `b` (scaled
    /// variable), stepping so that no increment exceeds 0.1 rad.
    fn envelope_increment(&self, a: f64, b: f64) -> Result<f64> {
        if b > super::kummer::Z_MAX || a > super::kummer::Z_MAX {
            return Err(Error::Overflow { modulus: a.max(b), limit: super::kummer::Z_MAX });
        }
        let env = |x: f64| self.m.envelope(C64::new(x, 0.0));
        let rate = |(e, de): (C64, C64)| (de / e).im;
        let mut x = a;
        let mut cur = env(x);
        let mut total = 0.0;
        let mut h = (b - a) / ((b - a).abs() / 0.25).ceil().max(1.0);
        let min_step = 1e-12 * (a.abs() + b.abs()).max(1e-300);
        while (b - x) * (b - a).signum() > 0.0 {
            let step = if (b - x).abs() <= h.abs() { b - x } else { h };
            let next = env(x + step);
            let predicted = 0.5 * step * (rate(cur) + rate(next));
            let actual = (next.0 / cur.0).arg();
            if predicted.abs() > MAX_INCREMENT || (actual - predicted).abs() > 0.5 * MAX_INCREMENT {
                h = 0.5 * step;
                if h.abs() < min_step {
                    return Err(Error::Convergence("phase stepping stalled".into()));
                }
                continue;
            }
            total += actual;
            x += step;
            cur = next;
        }
        Ok(total)
    }
}

/// `Θ(x)` for the given parameters.
pub fn phase_theta(params: PhysicalParams, x: f64) -> Result<f64> {
    PhaseFunction::new(params)?.theta(x)
}
