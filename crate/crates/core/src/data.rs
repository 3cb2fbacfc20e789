//! Initial data for a single Fourier mode.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{uniform_nodes, GridFunction, GridKind};
use crate::profile::{Profile, ORDER};

/// Compatibility checks recorded when data are prepared.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DataDiagnostics {
    /// Largest of `|ω⁰|, |ρ⁰|` at the two walls.
    pub boundary_residual: f64,
    /// Normalized endpoint orthogonality residuals at `y₀ = 0` and `y₀ = 1`.
    pub h_residuals: (f64, f64),
    /// Normalized components along the discrete eigenmodes that were checked.
    pub eig_projections: Vec<C64>,
    /// Whether a boundary cutoff was applied.
    pub cutoff_applied: bool,
}

/// Vorticity and density profiles of one mode, kept both as exact profiles
/// (used by every formula that needs derivatives) and as samples on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDataMode {
    pub omega0: GridFunction,
    pub rho0: GridFunction,
    pub omega: Profile,
    pub rho: Profile,
    pub diagnostics: DataDiagnostics,
}

/// Default sampling grid for [`InitialDataMode`].
pub const DEFAULT_SAMPLES: usize = 512;

impl InitialDataMode {
    pub fn new(omega: Profile, rho: Profile) -> Self {
        Self::on_nodes(omega, rho, uniform_nodes(DEFAULT_SAMPLES), GridKind::Uniform)
            .expect("uniform nodes are valid")
    }

    pub fn on_nodes(omega: Profile, rho: Profile, nodes: Vec<f64>, kind: GridKind) -> Result<Self> {
        let omega0 = GridFunction::from_fn(nodes.clone(), kind, |y| C64::new(omega.value(y), 0.0))?;
        let rho0 = GridFunction::from_fn(nodes, kind, |y| C64::new(rho.value(y), 0.0))?;
        let boundary_residual = [omega.value(0.0), omega.value(1.0), rho.value(0.0), rho.value(1.0)]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        Ok(Self {
            omega0,
            rho0,
            omega,
            rho,
            diagnostics: DataDiagnostics { boundary_residual, ..Default::default() },
        })
    }

    pub fn zero() -> Self {
        Self::new(Profile::Zero, Profile::Zero)
    }

    /// Same profiles and diagnostics sampled on other nodes.
    pub fn with_nodes(&self, nodes: Vec<f64>, kind: GridKind) -> Result<Self> {
        let mut d = Self::on_nodes(self.omega.clone(), self.rho.clone(), nodes, kind)?;
        d.diagnostics = self.diagnostics.clone();
        Ok(d)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.omega0.nodes
    }

    pub fn is_zero(&self) -> bool {
        self.omega.is_zero() && self.rho.is_zero()
    }

    /// Profiles multiplied by `a`.
    pub fn scaled(&self, a: f64) -> Self {
        let mut d = Self::on_nodes(
            self.omega.clone().scaled(a),
            self.rho.clone().scaled(a),
            self.omega0.nodes.clone(),
            self.omega0.kind,
        )
        .expect("nodes already validated");
        d.diagnostics = self.diagnostics.clone();
        d
    }

    /// Same data with the costly profile terms tabulated.
    pub fn tabulated(&self) -> Self {
        let mut d = Self::on_nodes(
            self.omega.with_costly_tabulated(),
            self.rho.with_costly_tabulated(), self.omega0.nodes.clone(), self.omega0.kind)
            .expect("nodes already validated");
        d.diagnostics = self.diagnostics.clone();
        d
    }

    /// Derivatives `[f, f', …, f'''']` of both profiles at `y`.
    pub fn jets(&self, y: f64) -> DataJets {
        DataJets { omega: self.omega.derivatives(y), rho: self.rho.derivatives(y) }
    }
}

/// Derivatives of `ω⁰` and `ρ⁰` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataJets {
    pub omega: [f64; ORDER + 1],
    pub rho: [f64; ORDER + 1],
}
