use serde::{Deserialize, Serialize};

use crate::data::InitialDataMode;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::specfun::{PhysicalParams, Regime};
use crate::tg::{DerivativeOrder, SpectralPoint, TaylorGoldstein};

/// Jump of the resolvent across the essential spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LapIntegrand {
    /// `ψ⁻ - ψ⁺`.
    pub dpsi: GridFunction,
    /// `ρ⁻ - ρ⁺`.
    pub drho: GridFunction,
}

/// `ψ⁻ - ψ⁺` and `ρ⁻ - ρ⁺` at `(y₀, ε)` on the data's nodes. Both branches
/// are solved; nothing assumes the data are real.
pub fn lap_integrand(params: PhysicalParams, data: &InitialDataMode, y0: f64, eps: f64) -> Result<LapIntegrand> {
    if !(0.0..=1.0).contains(&y0) || !(eps > 0.0) {
        return Err(Error::Domain(format!("need y0 in [0, 1] and eps > 0, got y0 = {y0}, eps = {eps}")));
    }
    let tg = TaylorGoldstein::new(params);
    let nodes = data.nodes();
    let plus = tg.resolvent(data, SpectralPoint::plus(y0, eps), nodes, DerivativeOrder::None)?;
    let minus = tg.resolvent(data, SpectralPoint::minus(y0, eps), nodes, DerivativeOrder::None)?;
    Ok(LapIntegrand {
        dpsi: minus.psi_grid().sub(&plus.psi_grid())?,
        drho: minus.rho_grid().sub(&plus.rho_grid())?,
    })
}

/// Outcome of the endpoint convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LapVerdict {
    /// Dropped by at least [`CONVERGING_DROP`] along the list.
    Converging,
    /// Dropped by less than [`STALLED_DROP`].
    Stalled,
    Inconclusive,
}

pub const CONVERGING_DROP: f64 = 10.0;
pub const STALLED_DROP: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointRow {
    pub y0: f64,
    /// `‖ψ⁻ - ψ⁺‖` for each ε.
    pub norms: Vec<f64>,
    /// First norm over last norm.
    pub drop: f64,
    pub monotone: bool,
    /// Observed orders `log(n_i/n_{i+1}) / log(ε_i/ε_{i+1})`.
    pub rates: Vec<f64>,
    pub verdict: LapVerdict,
}

/// Convergence table of the resolvent jump at both walls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LapTable {
    pub m: u32,
    pub beta: f64,
    pub eps: Vec<f64>,
    pub endpoints: Vec<EndpointRow>,
    /// `min(2μ, 1/2)` in the subcritical regime.
    pub expected_rate: Option<f64>,
}

/// `‖ψ⁻ - ψ⁺‖` at `y₀ = 0` and `y₀ = 1` along a decreasing ε list.
pub fn boundary_lap_check(params: PhysicalParams, data: &InitialDataMode, eps_list: &[f64]) -> Result<LapTable> {
    if eps_list.len() < 2 || eps_list.iter().any(|e| !(*e > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParams("eps list must hold at least two decreasing positive values".into()));
    }
    let data = data.tabulated();
    let endpoints = [0.0, 1.0]
        .iter()
        .map(|&y0| {
            let norms = eps_list
                .iter()
                .map(|&eps| Ok(lap_integrand(params, &data, y0, eps)?.dpsi.norm_l2()))
                .collect::<Result<Vec<f64>>>()?;
            let drop = norms[0] / norms[norms.len() - 1];
            let rates = norms
                .windows(2)
                .zip(eps_list.windows(2))
                .map(|(n, e)| (n[0] / n[1]).ln() / (e[0] / e[1]).ln())
                .collect();
            let verdict = if drop >= CONVERGING_DROP {
                LapVerdict::Converging
            } else if drop < STALLED_DROP {
                LapVerdict::Stalled
            } else {
                LapVerdict::Inconclusive
            };
            Ok(EndpointRow { y0, monotone: norms.windows(2).all(|w| w[1] <= w[0]), norms, drop, rates, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    let expected_rate = (params.regime == Regime::SubQuarter).then(|| (2.0 * params.mu).min(0.5));
    Ok(LapTable { m: params.m, beta: params.beta, eps: eps_list.to_vec(), endpoints, expected_rate })
}
