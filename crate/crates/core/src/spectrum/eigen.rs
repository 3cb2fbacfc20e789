use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridKind};
use crate::profile::{ModeField, ModeShape, Profile};
use crate::quad::integrate_unit;
use crate::specfun::PhysicalParams;

/// Boundary residual above which `c` is rejected as an eigenvalue.
pub const EIGEN_TOL: f64 = 1e-8;
const NORM_SAMPLES: usize = 1024;

/// Real eigenmode `(ω, ρ)` of the linearized operator at `c ∉ [0, 1]`,
/// normalized to `max|ψ| = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenmode {
    pub c: f64,
    /// Stream function profile; the other fields follow from `with_field`.
    pub shape: ModeShape,
    /// `|ψ(1)| / max|ψ|` before normalization.
    pub boundary_residual: f64,
    /// Largest `|Im|` of the normalized stream function on the sampling grid.
    pub imag_residual: f64,
    pub psi: GridFunction,
    pub omega: GridFunction,
    pub rho: GridFunction,
}

impl Eigenmode {
    pub fn profile(&self, field: ModeField) -> Profile {
        Profile::Mode(self.shape.with_field(field))
    }

    /// `(ω, ρ)` as profiles.
    pub fn fields(&self) -> (Profile, Profile) {
        (self.profile(ModeField::Vorticity), self.profile(ModeField::Density))
    }

    /// `∫ ω_c² + ρ_c²`.
    pub fn norm_sq(&self) -> f64 {
        let (w, r) = self.fields();
        integrate_unit(|y, _| w.value(y).powi(2) + r.value(y).powi(2))
    }
}

/// Eigenmode at `c`, sampled on `nodes`. The stream function is the
/// homogeneous solution vanishing at `y = 0`; `c` is accepted when it also
/// vanishes at `y = 1`.
pub fn build_eigenfunction(params: PhysicalParams, c: f64, nodes: &[f64]) -> Result<Eigenmode> {
    let raw = ModeShape::new(params, c, ModeField::Stream, C64::new(1.0, 0.0))?;
    let mut peak = (0.0, C64::new(0.0, 0.0));
    for i in 0..=NORM_SAMPLES {
        let y = i as f64 / NORM_SAMPLES as f64;
        let v = raw.stream(y)?.0;
        if v.norm() > peak.1.norm() {
            peak = (y, v);
        }
    }
    let end = raw.stream(1.0)?.0;
    let boundary_residual = end.norm() / peak.1.norm();
    if !(boundary_residual <= EIGEN_TOL) {
        return Err(Error::NotAnEigenvalue { c, residual: boundary_residual });
    }
    let scale = 1.0 / peak.1;
    let shape = ModeShape::new(params, c, ModeField::Stream, scale)?;
    let mut imag_residual = 0.0f64;
    for i in 0..=NORM_SAMPLES {
        let y = i as f64 / NORM_SAMPLES as f64;
        imag_residual = imag_residual.max((scale * raw.stream(y)?.0).im.abs());
    }
    let sample = |field: ModeField| {
        let p = Profile::Mode(shape.with_field(field));
        GridFunction::from_fn(nodes.to_vec(), GridKind::Uniform, |y| C64::new(p.value(y), 0.0))
    };
    Ok(Eigenmode {
        c,
        boundary_residual,
        imag_residual,
        psi: sample(ModeField::Stream)?,
        omega: sample(ModeField::Vorticity)?,
        rho: sample(ModeField::Density)?,
        shape,
    })
}

/// `∫ ρ_c ω + ω_c ρ`: annihilates every other eigenmode and satisfies
/// `ℓ(L v) = c ℓ(v)`.
pub fn left_functional(mode: &Eigenmode, omega: &Profile, rho: &Profile) -> f64 {
    let (wc, rc) = mode.fields();
    integrate_unit(|y, _| rc.value(y) * omega.value(y) + wc.value(y) * rho.value(y))
}
