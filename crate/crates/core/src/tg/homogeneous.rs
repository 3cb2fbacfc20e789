use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::SpectralPoint;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridKind};
use crate::specfun::{BranchedArg, ComplexEval, PhysicalParams, Regime, ScaledPair};

/// Relative size of the Wronskian below which a spectral point is treated as
/// lying on an eigenvalue.
pub const NEAR_SINGULAR: f64 = 1e-10;

/// Green's function value and first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensEval {
    pub g: C64,
    pub dg_dy: C64,
    pub dg_dz: C64,
    pub near_singular: bool,
}

/// Taylor–Goldstein machinery for fixed `(m, β)`; owns the special-function
/// tables so that many spectral points can share them.
#[derive(Debug, Clone)]
pub struct TaylorGoldstein {
    pair: ScaledPair,
}

impl TaylorGoldstein {
    pub fn new(params: PhysicalParams) -> Self {
        Self { pair: ScaledPair::new(params) }
    }

    pub fn params(&self) -> &PhysicalParams {
        self.pair.params()
    }

    pub fn pair(&self) -> &ScaledPair {
        &self.pair
    }

    /// Dirichlet solutions `φ_u` (vanishing at 1) and `φ_l` (vanishing at 0)
    /// for one spectral point.
    pub fn at(&self, sp: SpectralPoint) -> Result<HomogeneousSolutions<'_>> {
        HomogeneousSolutions::new(&self.pair, sp)
    }

    /// Endpoint generalized eigenfunctions sampled on `nodes`.
    pub fn endpoint_eigenfunctions(&self, nodes: &[f64]) -> Result<EndpointEigenfunctions> {
        let ends = EndpointSolution::new(&self.pair)?;
        let mut u = Vec::with_capacity(nodes.len());
        let mut l = Vec::with_capacity(nodes.len());
        for &y in nodes {
            u.push(ends.value(y)?);
            l.push(ends.value(1.0 - y)?);
        }
        Ok(EndpointEigenfunctions {
            phi_u: GridFunction::new(nodes.to_vec(), u, GridKind::Uniform)?,
            phi_l: GridFunction::new(nodes.to_vec(), l, GridKind::Uniform)?,
        })
    }
}

/// `φ_u`, `φ_l` at one spectral point.
#[derive(Debug, Clone)]
pub struct HomogeneousSolutions<'a> {
    pair: &'a ScaledPair,
    sp: SpectralPoint,
    /// `(first, second)` at `ζ = 1 - y₀ ± iε`.
    top: (C64, C64),
    /// `(first, second)` at `ζ = -y₀ ± iε`.
    bottom: (C64, C64),
    orient: f64,
    wronskian: C64,
    scale: f64,
}

impl<'a> HomogeneousSolutions<'a> {
    pub fn new(pair: &'a ScaledPair, sp: SpectralPoint) -> Result<Self> {
        let top = pair.values(sp.zeta(1.0))?;
        let bottom = pair.values(sp.zeta(0.0))?;
        // The critical-regime formulas list the logarithmic solution first.
        let orient = if pair.params().regime == Regime::Quarter { -1.0 } else { 1.0 };
        let wp = pair.wronskian();
        let wronskian = wp * (top.0 * bottom.1 - top.1 * bottom.0);
        let scale = wp.norm() * (top.0 * bottom.1).norm().max((top.1 * bottom.0).norm());
        Ok(Self { pair, sp, top, bottom, orient, wronskian, scale })
    }

    pub fn spectral_point(&self) -> SpectralPoint {
        self.sp
    }

    pub fn params(&self) -> &PhysicalParams {
        self.pair.params()
    }

    /// `φ_u φ_l' - φ_u' φ_l`.
    pub fn wronskian(&self) -> C64 {
        self.wronskian
    }

    /// Size of the two products whose difference gives the Wronskian.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn near_singular(&self) -> bool {
        !(self.wronskian.norm() >= NEAR_SINGULAR * self.scale)
    }

    /// `(φ_u, φ_l)` with derivatives in `y`.
    pub fn at(&self, y: f64) -> Result<(ComplexEval, ComplexEval)> {
        let e = self.pair.eval(self.sp.zeta(y))?;
        let (f, s) = (e.first, e.second);
        let comb = |(a, b): (C64, C64)| {
            ComplexEval::new(
                self.orient * (a * s.value - b * f.value),
                self.orient * (a * s.derivative - b * f.derivative),
            )
        };
        Ok((comb(self.top), comb(self.bottom)))
    }

    /// `(φ_u, φ_l)` values only; `y = y₀` with `ε = 0` is allowed.
    pub fn values(&self, y: f64) -> Result<(C64, C64)> {
        let (f, s) = self.pair.values(self.sp.zeta(y))?;
        let comb = |(a, b): (C64, C64)| self.orient * (a * s - b * f);
        Ok((comb(self.top), comb(self.bottom)))
    }

    /// Green's function with `TG 𝒢 = δ(y - z)` and Dirichlet conditions.
    pub fn greens(&self, y: f64, z: f64) -> Result<GreensEval> {
        check_unit(y)?;
        check_unit(z)?;
        let w = self.wronskian;
        let (u_y, l_y) = self.at(y)?;
        let (u_z, l_z) = self.at(z)?;
        let (g, dg_dy, dg_dz) = if z <= y {
            (
                -u_y.value * l_z.value / w,
                -u_y.derivative * l_z.value / w,
                -u_y.value * l_z.derivative / w,
            )
        } else {
            (
                -u_z.value * l_y.value / w,
                -u_z.value * l_y.derivative / w,
                -u_z.derivative * l_y.value / w,
            )
        };
        Ok(GreensEval { g, dg_dy, dg_dz, near_singular: self.near_singular() })
    }
}

fn check_unit(y: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("point {y} is outside [0, 1]")));
    }
    Ok(())
}

/// Generalized eigenfunctions attached to the endpoints of the essential
/// spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointEigenfunctions {
    pub phi_u: GridFunction,
    pub phi_l: GridFunction,
}

/// `φ_u` of the endpoint `y₀ = 0`; `φ_l(y) = φ_u(1 - y)`.
#[derive(Debug, Clone)]
pub(crate) struct EndpointSolution<'a> {
    pair: &'a ScaledPair,
    top: (C64, C64),
    orient: f64,
}

impl<'a> EndpointSolution<'a> {
    pub(crate) fn new(pair: &'a ScaledPair) -> Result<Self> {
        let top = pair.values(BranchedArg::real(1.0))?;
        let orient = if pair.params().regime == Regime::Quarter { -1.0 } else { 1.0 };
        Ok(Self { pair, top, orient })
    }

    pub(crate) fn value(&self, y: f64) -> Result<C64> {
        let (f, s) = self.pair.values(BranchedArg::real(y))?;
        Ok(self.orient * (self.top.0 * s - self.top.1 * f))
    }
}
