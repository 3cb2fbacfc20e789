use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::kummer::Z_MAX;
use super::whittaker::{BranchedArg, ComplexEval, WhittakerM, WhittakerW0};
use crate::error::{Error, Result};

/// Tolerance on `|β² - 1/4|` below which the critical regime is selected.
pub const QUARTER_TOL: f64 = 1e-12;

/// Spectral regime selected by the sign of `1/4 - β²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    SubQuarter,
    Quarter,
    SuperQuarter,
}

/// Fourier mode, buoyancy parameter and the derived Frobenius exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub m: u32,
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
    pub regime: Regime,
}

impl PhysicalParams {
    pub fn new(m: u32, beta: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("the mode number m must be at least 1".into()));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
        }
        let d = 0.25 - beta * beta;
        let (mu, nu, regime) = if d.abs() <= QUARTER_TOL {
            (0.0, 0.0, Regime::Quarter)
        } else if d > 0.0 {
            (d.sqrt(), 0.0, Regime::SubQuarter)
        } else {
            (0.0, (-d).sqrt(), Regime::SuperQuarter)
        };
        Ok(Self { m, beta, mu, nu, regime })
    }

    pub fn beta2(&self) -> f64 {
        self.beta * self.beta
    }

    pub fn mf(&self) -> f64 {
        self.m as f64
    }

    /// Order `μ + iν` of the first member of the generic pair.
    pub fn gamma(&self) -> C64 {
        C64::new(self.mu, self.nu)
    }
}

/// Values of both members of the regime pair at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEval {
    pub first: ComplexEval,
    pub second: ComplexEval,
}

#[derive(Debug, Clone)]
enum PairKind {
    Generic { plus: WhittakerM, minus: WhittakerM },
    Quarter { m0: WhittakerM, w0: WhittakerW0 },
}

/// Independent solutions of the homogeneous Taylor–Goldstein equation in
/// the shifted variable: `M_{0,±γ}(2mζ)`, or `M_{0,0}(2mζ)` and `W_{0,0}(2mζ)`
/// when `β² = 1/4`.
#[derive(Debug, Clone)]
pub struct ScaledPair {
    params: PhysicalParams,
    kind: PairKind,
    wronskian: C64,
}

impl ScaledPair {
    pub fn new(params: PhysicalParams) -> Self {
        let kind = match params.regime {
            Regime::Quarter => PairKind::Quarter {
                m0: WhittakerM::new(C64::new(0.0, 0.0)).expect("admissible order"),
                w0: WhittakerW0::new(),
            },
            _ => PairKind::Generic {
                plus: WhittakerM::new(params.gamma()).expect("admissible order"),
                minus: WhittakerM::new(-params.gamma()).expect("admissible order"),
            },
        };
        let mut pair = Self { params, kind, wronskian: C64::new(0.0, 0.0) };
        let p = pair
            .eval(BranchedArg::real(0.25 / params.mf()))
            .expect("reference point is inside the series domain");
        pair.wronskian = p.first.value * p.second.derivative - p.first.derivative * p.second.value;
        pair
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// `first·second' - first'·second`, measured once at a reference point.
    pub fn wronskian(&self) -> C64 {
        self.wronskian
    }

    /// Largest `|ζ|` accepted.
    pub fn max_modulus(&self) -> f64 {
        Z_MAX / (2.0 * self.params.mf())
    }

    pub fn eval(&self, arg: BranchedArg) -> Result<PairEval> {
        let s = 2.0 * self.params.mf();
        let a = arg.scaled(s);
        let (f, g) = match &self.kind {
            PairKind::Generic { plus, minus } => (plus.eval(a)?, minus.eval(a)?),
            PairKind::Quarter { m0, w0 } => (m0.eval(a)?, w0.eval(a)?),
        };
        let c = C64::new(s, 0.0);
        Ok(PairEval {
            first: ComplexEval::new(f.value, f.derivative * c),
            second: ComplexEval::new(g.value, g.derivative * c),
        })
    }

    /// Values only; `ζ = 0` is allowed.
    pub fn values(&self, arg: BranchedArg) -> Result<(C64, C64)> {
        let a = arg.scaled(2.0 * self.params.mf());
        match &self.kind {
            PairKind::Generic { plus, minus } => Ok((plus.value(a)?, minus.value(a)?)),
            PairKind::Quarter { m0, w0 } => Ok((m0.value(a)?, w0.value(a)?)),
        }
    }

    /// Envelope of the first member, used by the phase function.
    pub(crate) fn first_order(&self) -> Option<&WhittakerM> {
        match &self.kind {
            PairKind::Generic { plus, .. } => Some(plus),
            PairKind::Quarter { .. } => None,
        }
    }
}

/// Regime pair at `arg`, with derivatives taken with respect to `ζ`.
pub fn scaled_pair(params: PhysicalParams, arg: BranchedArg) -> Result<PairEval> {
    ScaledPair::new(params).eval(arg)
}
