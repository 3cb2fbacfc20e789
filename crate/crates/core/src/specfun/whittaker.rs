use std::f64::consts::{LN_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::kummer::{Compensated, KummerSeries, Z_MAX};
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Value of a function together with its derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEval {
    pub value: C64,
    pub derivative: C64,
}

impl ComplexEval {
    pub fn new(value: C64, derivative: C64) -> Self {
        Self { value, derivative }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.derivative.is_finite()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.value.conj(), self.derivative.conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.value * s, self.derivative * s)
    }
}

/// Side of the negative real axis an argument is approached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// Limit from the upper half plane (`+iε`).
    Plus,
    /// Limit from the lower half plane (`-iε`).
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

/// Complex argument plus the side used when it sits on the negative real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedArg {
    pub zeta: C64,
    pub branch: Option<Branch>,
}

impl BranchedArg {
    pub fn new(zeta: C64) -> Self {
        Self { zeta, branch: None }
    }

    pub fn real(x: f64) -> Self {
        Self::new(C64::new(x, 0.0))
    }

    pub fn with_branch(zeta: C64, branch: Branch) -> Self {
        Self { zeta, branch: Some(branch) }
    }

    pub fn on_cut(&self) -> bool {
        self.zeta.im == 0.0 && self.zeta.re < 0.0
    }

    /// Logarithm on the principal branch, or with argument `±π` on the cut.
    pub fn log(&self) -> Result<C64> {
        let z = self.zeta;
        if z.re == 0.0 && z.im == 0.0 {
            return Err(Error::Domain("logarithm of zero".into()));
        }
        if self.on_cut() {
            let arg = match self.branch {
                Some(Branch::Plus) => PI,
                Some(Branch::Minus) => -PI,
                None => return Err(Error::Branch { re: z.re }),
            };
            return Ok(C64::new((-z.re).ln(), arg));
        }
        Ok(z.ln())
    }

    /// Argument in (-π, π], using the branch on the cut.
    pub fn arg(&self) -> Result<f64> {
        Ok(self.log()?.im)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { zeta: self.zeta * s, branch: self.branch }
    }
}

fn check_modulus(z: C64) -> Result<()> {
    let r = z.norm();
    if r > Z_MAX || !r.is_finite() {
        return Err(Error::Overflow { modulus: r, limit: Z_MAX });
    }
    Ok(())
}

/// Whittaker function `M_{0,γ}` for a fixed order.
///
/// Evaluation uses `M_{0,γ}(ζ) = ζ^{1/2+γ} E(ζ)` with the even envelope
/// `E(ζ) = e^{-ζ/2} M(1/2+γ, 1+2γ, ζ)`; the series is always summed in the
/// right half plane.
#[derive(Debug, Clone)]
pub struct WhittakerM {
    gamma: C64,
    series: KummerSeries,
}

impl WhittakerM {
    pub fn new(gamma: C64) -> Result<Self> {
        let a = 0.5 + gamma;
        let series = KummerSeries::new(a, 2.0 * a)?;
        Ok(Self { gamma, series })
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    /// Envelope `E` and its derivative.
    pub(crate) fn envelope(&self, z: C64) -> (C64, C64) {
        if z.re >= 0.0 {
            let (s, ds) = self.series.eval(z);
            let w = (-0.5 * z).exp();
            (w * s, w * (ds - 0.5 * s))
        } else {
            let (s, ds) = self.series.eval(-z);
            let w = (0.5 * z).exp();
            (w * s, -w * (ds - 0.5 * s))
        }
    }

    pub fn eval(&self, arg: BranchedArg) -> Result<ComplexEval> {
        let z = arg.zeta;
        check_modulus(z)?;
        let lz = arg.log()?;
        let p = ((0.5 + self.gamma) * lz).exp();
        let (e, de) = self.envelope(z);
        Ok(ComplexEval::new(p * e, p * ((0.5 + self.gamma) * e / z + de)))
    }

    /// Value only; the origin is allowed and maps to zero.
    pub fn value(&self, arg: BranchedArg) -> Result<C64> {
        let z = arg.zeta;
        check_modulus(z)?;
        if z.re == 0.0 && z.im == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let lz = arg.log()?;
        Ok(((0.5 + self.gamma) * lz).exp() * self.envelope(z).0)
    }
}

/// `M_{0,γ}(ζ)` and its derivative.
pub fn whittaker_m(gamma: C64, arg: BranchedArg) -> Result<ComplexEval> {
    WhittakerM::new(gamma)?.eval(arg)
}

/// Below this modulus `W_{0,0}` is summed from its logarithmic series.
const W_SERIES_RADIUS: f64 = 4.0;
/// Width (in the substituted variable) of the integral panels.
const W_PANEL: f64 = 0.25;

/// Whittaker function `W_{0,0}`.
///
/// Small arguments use the logarithmic series with digamma values at integers
/// and half integers. Larger arguments in `|arg ζ| ≤ 3π/4` use the Laplace
/// integral of Tricomi's function rotated onto the ray of `ζ`; the rest of the
/// plane is reached through `W(ζe^{±iπ}) = √π M_{0,0}(ζ) ± i W(ζ)`.
#[derive(Debug, Clone)]
pub struct WhittakerW0 {
    m00: WhittakerM,
    coeffs: Vec<f64>,
    digamma_combo: Vec<f64>,
}

impl WhittakerW0 {
    pub fn new() -> Self {
        let n = 200;
        let mut coeffs = Vec::with_capacity(n);
        let mut digamma_combo = Vec::with_capacity(n);
        let mut c = 1.0;
        let mut harmonic = 0.0;
        let mut odd = 0.0;
        for s in 0..n {
            if s > 0 {
                let sf = s as f64;
                c *= (sf - 0.5) / (sf * sf);
                harmonic += 1.0 / sf;
                odd += 1.0 / (2.0 * sf - 1.0);
            }
            let psi_int = -EULER_GAMMA + harmonic;
            let psi_half = -EULER_GAMMA - 2.0 * LN_2 + 2.0 * odd;
            coeffs.push(c);
            digamma_combo.push(2.0 * psi_int - psi_half);
        }
        Self {
            m00: WhittakerM::new(C64::new(0.0, 0.0)).expect("b = 1 is admissible"),
            coeffs,
            digamma_combo,
        }
    }

    pub fn eval(&self, arg: BranchedArg) -> Result<ComplexEval> {
        let z = arg.zeta;
        check_modulus(z)?;
        if z.re == 0.0 && z.im == 0.0 {
            return Err(Error::Domain("W_{0,0} derivative is singular at 0".into()));
        }
        if z.norm() <= W_SERIES_RADIUS {
            return self.series(arg);
        }
        let theta = arg.arg()?;
        if theta.abs() <= 0.75 * PI {
            return Ok(self.integral(z, theta));
        }
        // Continuation from -ζ, which lies in the sector |arg| < π/4.
        let xi = -z;
        let upper = z.im > 0.0 || (z.im == 0.0 && arg.branch == Some(Branch::Plus));
        let s = if upper { 1.0 } else { -1.0 };
        let inner = BranchedArg::new(xi);
        let m = self.m00.eval(inner)?;
        let w = self.integral(xi, xi.arg());
        let i = C64::new(0.0, s);
        let sp = PI.sqrt();
        Ok(ComplexEval::new(
            sp * m.value + i * w.value,
            -(sp * m.derivative + i * w.derivative),
        ))
    }

    pub fn value(&self, arg: BranchedArg) -> Result<C64> {
        let z = arg.zeta;
        if z.re == 0.0 && z.im == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(self.eval(arg)?.value)
    }

    fn series(&self, arg: BranchedArg) -> Result<ComplexEval> {
        let z = arg.zeta;
        let lz = arg.log()?;
        let mut t = Compensated::default();
        let mut dt = Compensated::default();
        dt.add(-self.coeffs[0] / z);
        let mut zpow = C64::new(1.0, 0.0);
        let mut zprev = C64::new(0.0, 0.0);
        let mut run = 0;
        for (s, (&c, &d)) in self.coeffs.iter().zip(&self.digamma_combo).enumerate() {
            let term = c * zpow * (d - lz);
            t.add(term);
            let dterm = if s == 0 {
                C64::new(0.0, 0.0)
            } else {
                c * zprev * (s as f64 * (d - lz) - 1.0)
            };
            dt.add(dterm);
            if term.norm() <= 1e-16 * t.value().norm() && dterm.norm() <= 1e-16 * dt.value().norm() {
                run += 1;
                if run >= 8 {
                    break;
                }
            } else {
                run = 0;
            }
            zprev = zpow;
            zpow *= z;
        }
        let pref = (-0.5 * z + 0.5 * lz).exp() / PI.sqrt();
        let w = pref * t.value();
        let dw = w * (-0.5 + 0.5 / z) + pref * dt.value();
        Ok(ComplexEval::new(w, dw))
    }

    /// Rotated Laplace integrals for `U(1/2, 1, ζ)` and `U(3/2, 2, ζ)`.
    fn integral(&self, z: C64, theta: f64) -> ComplexEval {
        let r = z.norm();
        let rot = C64::from_polar(1.0, -theta);
        let upper = (45.0 / r).sqrt();
        let panels = (upper / W_PANEL).ceil() as usize;
        let h = upper / panels as f64;
        let rule = GaussLegendre::standard();
        let mut i0 = Compensated::default();
        let mut i1 = Compensated::default();
        for p in 0..panels {
            for (u, w) in rule.on(p as f64 * h, (p + 1) as f64 * h) {
                let u2 = u * u;
                let k = (1.0 + u2 * rot).sqrt().inv() * ((-r * u2).exp() * w);
                i0.add(k);
                i1.add(k * u2);
            }
        }
        let sp = PI.sqrt();
        let env = (-0.5 * z).exp();
        // ζ^{1/2} U(1/2,1,ζ): the rotation phases cancel.
        let w = env * r.sqrt() * 2.0 * i0.value() / sp;
        // ζ^{1/2} U(3/2,2,ζ) = 4 r^{1/2} e^{-iθ} I1 / √π.
        let zu1 = r.sqrt() * C64::from_polar(1.0, -theta) * 4.0 * i1.value() / sp;
        let dw = w * (-0.5 + 0.5 / z) - 0.5 * env * zu1;
        ComplexEval::new(w, dw)
    }
}

impl Default for WhittakerW0 {
    fn default() -> Self {
        Self::new()
    }
}

/// `W_{0,0}(ζ)` and its derivative.
pub fn whittaker_w0(arg: BranchedArg) -> Result<ComplexEval> {
    WhittakerW0::new().eval(arg)
}
