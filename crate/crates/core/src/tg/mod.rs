//! Taylor–Goldstein equation: homogeneous solutions, Wronskians, Green's
//! functions and the regularized resolvent.

mod homogeneous;
mod resolvent;
mod solver;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub(crate) use homogeneous::EndpointSolution;
pub use homogeneous::{EndpointEigenfunctions, GreensEval, HomogeneousSolutions, TaylorGoldstein, NEAR_SINGULAR};

pub use resolvent::{
    d_y0_stream, generalized_stream, solve_inhomogeneous, solve_inhomogeneous_with, source_f, source_terms,
    DerivativeOrder, ResolventFields, SourceTerms, StreamDerivatives,
};
pub use solver::GreenSolver;

use crate::error::{Error, Result};
use crate::specfun::{Branch, BranchedArg, ComplexEval, PhysicalParams};

/// Spectral parameter `-y₀ ± iε` of the resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub y0: f64,
    pub eps: f64,
    pub branch: Branch,
}

impl SpectralPoint {
    pub fn new(y0: f64, eps: f64, branch: Branch) -> Result<Self> {
        if !(y0.is_finite() && eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidParams(format!("bad spectral point y0 = {y0}, eps = {eps}")));
        }
        Ok(Self { y0, eps, branch })
    }

    pub fn plus(y0: f64, eps: f64) -> Self {
        Self::new(y0, eps, Branch::Plus).expect("finite spectral point")
    }

    pub fn minus(y0: f64, eps: f64) -> Self {
        Self::new(y0, eps, Branch::Minus).expect("finite spectral point")
    }

    pub fn conj(self) -> Self {
        Self { branch: self.branch.flip(), ..self }
    }

    /// `ζ = y - y₀ ± iε`, carrying the branch for on-cut arguments.
    pub fn zeta(&self, y: f64) -> BranchedArg {
        BranchedArg::with_branch(C64::new(y - self.y0, self.branch.sign() * self.eps), self.branch)
    }
}

/// `φ_u`, `φ_l` and their `y`-derivatives at `y`.
pub fn homogeneous_pair(params: PhysicalParams, sp: SpectralPoint, y: f64) -> Result<(ComplexEval, ComplexEval)> {
    TaylorGoldstein::new(params).at(sp)?.at(y)
}

/// Wronskian `φ_u φ_l' - φ_u' φ_l` of the Dirichlet solutions.
pub fn wronskian(params: PhysicalParams, sp: SpectralPoint) -> Result<C64> {
    Ok(TaylorGoldstein::new(params).at(sp)?.wronskian())
}

/// Green's function of `TG` with Dirichlet conditions.
pub fn greens(params: PhysicalParams, sp: SpectralPoint, y: f64, z: f64) -> Result<GreensEval> {
    TaylorGoldstein::new(params).at(sp)?.greens(y, z)
}

/// Endpoint generalized eigenfunctions on `nodes`.
pub fn endpoint_eigenfunctions(params: PhysicalParams, nodes: &[f64]) -> Result<EndpointEigenfunctions> {
    TaylorGoldstein::new(params).endpoint_eigenfunctions(nodes)
}
