use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::homogeneous::TaylorGoldstein;
use super::solver::GreenSolver;
use super::SpectralPoint;
use crate::data::{DataJets, InitialDataMode};
use crate::error::Result;
use crate::grid::{GridFunction, GridKind};
use crate::specfun::PhysicalParams;

/// Regularized source `F` and its derivatives along `D = ∂_z + ∂_{y₀}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceTerms {
    pub f: C64,
    pub df: C64,
    pub d2f: C64,
}

/// `F = Δ_m ρ⁰ - Δ_m(ζ ω⁰)/β²` with `ζ = z - y₀ ± iε`, together with `DF`
/// and `D²F`. Only `∂_{y₀}F = Δ_m ω⁰/β²` depends on the spectral point.
pub fn source_terms(params: &PhysicalParams, jets: &DataJets, zeta: C64) -> SourceTerms {
    let m2 = params.mf() * params.mf();
    let ib2 = 1.0 / params.beta2();
    let w = &jets.omega;
    let r = &jets.rho;
    // Δ_m ω⁰ and its first two derivatives.
    let lw = [w[2] - m2 * w[0], w[3] - m2 * w[1], w[4] - m2 * w[2]];
    let lr = [r[2] - m2 * r[0], r[3] - m2 * r[1], r[4] - m2 * r[2]];
    let f = lr[0] - ib2 * (zeta * lw[0] + 2.0 * w[1]);
    let fz = lr[1] - ib2 * (lw[0] + zeta * lw[1] + 2.0 * w[2]);
    let fzz = lr[2] - ib2 * (2.0 * lw[1] + zeta * lw[2] + 2.0 * w[3]);
    let fy0 = ib2 * lw[0];
    let fzy0 = ib2 * lw[1];
    SourceTerms { f, df: fz + fy0, d2f: fzz + 2.0 * fzy0 }
}

/// `F(z, y₀)` for the given data and spectral point.
pub fn source_f(params: &PhysicalParams, data: &InitialDataMode, sp: SpectralPoint, z: f64) -> C64 {
    source_terms(params, &data.jets(z), sp.zeta(z).zeta).f
}

/// How many `D`-derivatives of the regularized solution to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DerivativeOrder {
    None,
    First,
    Second,
}

/// Generalized stream function, density and their derivatives at the output
/// nodes for one spectral point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventFields {
    pub nodes: Vec<f64>,
    /// `φ` and `φ'`.
    pub phi: Vec<C64>,
    pub dphi_dy: Vec<C64>,
    pub psi: Vec<C64>,
    pub dpsi_dy: Vec<C64>,
    pub rho: Vec<C64>,
    /// Present when first `D`-derivatives were requested.
    pub dpsi_dy0: Option<Vec<C64>>,
    pub drho_dy0: Option<Vec<C64>>,
    /// `∂_{y₀}²ψ`, present when second derivatives were requested.
    pub d2psi_dy0: Option<Vec<C64>>,
    /// `∂_y φ` at the walls.
    pub wall_slopes: (C64, C64),
    pub near_singular: bool,
}

impl ResolventFields {
    pub fn psi_grid(&self) -> GridFunction {
        grid(&self.nodes, &self.psi)
    }

    pub fn rho_grid(&self) -> GridFunction {
        grid(&self.nodes, &self.rho)
    }
}

fn grid(nodes: &[f64], v: &[C64]) -> GridFunction {
    GridFunction { nodes: nodes.to_vec(), values: v.to_vec(), kind: GridKind::Uniform }
}

impl TaylorGoldstein {
    /// Resolvent `(ψ, ρ) = (-y₀ ± iε + L_m)⁻¹(ψ⁰, ρ⁰)` at `nodes`, built from
    /// the regularized source and the Green's function.
    pub fn resolvent(
        &self,
        data: &InitialDataMode,
        sp: SpectralPoint,
        nodes: &[f64],
        order: DerivativeOrder,
    ) -> Result<ResolventFields> {
        let hom = self.at(sp)?;
        let near_singular = hom.near_singular();
        let solver = GreenSolver::new(hom, nodes)?;
        self.resolvent_with(&solver, data, sp, order, near_singular)
    }

    pub(crate) fn resolvent_with(
        &self,
        solver: &GreenSolver<'_>,
        data: &InitialDataMode,
        sp: SpectralPoint,
        order: DerivativeOrder,
        near_singular: bool,
    ) -> Result<ResolventFields> {
        let params = *self.params();
        let ib2 = 1.0 / params.beta2();
        let m2 = params.mf() * params.mf();
        let terms: Vec<SourceTerms> = solver
            .nodes()
            .iter()
            .map(|&z| source_terms(&params, &data.jets(z), sp.zeta(z).zeta))
            .collect();
        let f: Vec<C64> = terms.iter().map(|t| t.f).collect();
        let zero = C64::new(0.0, 0.0);
        let (base, wall_slopes) = solver.solve_walls(&f, zero, zero);
        let nodes = solver.outputs().to_vec();
        let n = nodes.len();
        let zetas: Vec<C64> = nodes.iter().map(|&y| sp.zeta(y).zeta).collect();
        let jets: Vec<DataJets> = nodes.iter().map(|&y| data.jets(y)).collect();

        let phi: Vec<C64> = base.iter().map(|p| p.0).collect();
        let dphi: Vec<C64> = base.iter().map(|p| p.1).collect();
        let mut psi = Vec::with_capacity(n);
        let mut dpsi = Vec::with_capacity(n);
        let mut rho = Vec::with_capacity(n);
        for i in 0..n {
            let (w, r, z) = (&jets[i].omega, &jets[i].rho, zetas[i]);
            psi.push(ib2 * z * w[0] - r[0] + phi[i]);
            dpsi.push(ib2 * (w[0] + z * w[1]) - r[1] + dphi[i]);
            rho.push(ib2 * w[0] + phi[i] / z);
        }

        let (mut dpsi_dy0, mut drho_dy0, mut d2psi_dy0) = (None, None, None);
        if order >= DerivativeOrder::First {
            let df: Vec<C64> = terms.iter().map(|t| t.df).collect();
            let (first, slopes) = solver.solve_walls(&df, wall_slopes.0, wall_slopes.1);
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for i in 0..n {
                let dy0_phi = first[i].0 - dphi[i];
                let z = zetas[i];
                a.push(-ib2 * jets[i].omega[0] + dy0_phi);
                b.push(phi[i] / (z * z) + dy0_phi / z);
            }
            dpsi_dy0 = Some(a);
            drho_dy0 = Some(b);
            if order >= DerivativeOrder::Second {
                let d2f: Vec<C64> = terms.iter().map(|t| t.d2f).collect();
                let f0 = terms_at(&params, data, sp, 0.0).f;
                let f1 = terms_at(&params, data, sp, 1.0).f;
                let second = solver.solve_with(&d2f, 2.0 * slopes.0 - f0, 2.0 * slopes.1 - f1);
                let mut c = Vec::with_capacity(n);
                for i in 0..n {
                    let z = zetas[i];
                    let fy = terms_at(&params, data, sp, nodes[i]).f;
                    let phi_yy = fy + m2 * phi[i] - params.beta2() * phi[i] / (z * z);
                    c.push(second[i].0 - 2.0 * first[i].1 + phi_yy);
                }
                d2psi_dy0 = Some(c);
            }
        }
        Ok(ResolventFields {
            nodes,
            phi,
            dphi_dy: dphi,
            psi,
            dpsi_dy: dpsi,
            rho,
            dpsi_dy0,
            drho_dy0,
            d2psi_dy0,
            wall_slopes,
            near_singular,
        })
    }
}

fn terms_at(params: &PhysicalParams, data: &InitialDataMode, sp: SpectralPoint, z: f64) -> SourceTerms {
    source_terms(params, &data.jets(z), sp.zeta(z).zeta)
}

/// `(ψ, ρ)` on the data's own nodes.
pub fn generalized_stream(
    params: PhysicalParams,
    data: &InitialDataMode,
    sp: SpectralPoint,
) -> Result<(GridFunction, GridFunction)> {
    let tg = TaylorGoldstein::new(params);
    let r = tg.resolvent(data, sp, data.nodes(), DerivativeOrder::None)?;
    Ok((r.psi_grid(), r.rho_grid()))
}

/// `∂_{y₀}ψ`, `∂_yψ` and `∂_{y₀}ρ` on the data's own nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamDerivatives {
    pub dpsi_dy0: GridFunction,
    pub dpsi_dy: GridFunction,
    pub drho_dy0: GridFunction,
}

pub fn d_y0_stream(params: PhysicalParams, data: &InitialDataMode, sp: SpectralPoint) -> Result<StreamDerivatives> {
    let tg = TaylorGoldstein::new(params);
    let r = tg.resolvent(data, sp, data.nodes(), DerivativeOrder::First)?;
    Ok(StreamDerivatives {
        dpsi_dy0: grid(&r.nodes, r.dpsi_dy0.as_ref().expect("first derivatives requested")),
        dpsi_dy: grid(&r.nodes, &r.dpsi_dy),
        drho_dy0: grid(&r.nodes, r.drho_dy0.as_ref().expect("first derivatives requested")),
    })
}

/// `Φ` on `f.nodes` for `TG Φ = f`, `Φ(0) = Φ(1) = 0`.
pub fn solve_inhomogeneous(params: PhysicalParams, sp: SpectralPoint, f: &GridFunction) -> Result<GridFunction> {
    let v = solve_inhomogeneous_with(params, sp, &f.nodes, |z| interpolate(f, z))?;
    GridFunction::new(f.nodes.clone(), v, f.kind)
}

/// `Φ` at arbitrary increasing `outputs` in [0, 1], with the source given as
/// a function.
pub fn solve_inhomogeneous_with(
    params: PhysicalParams,
    sp: SpectralPoint,
    outputs: &[f64],
    f: impl Fn(f64) -> C64,
) -> Result<Vec<C64>> {
    let tg = TaylorGoldstein::new(params);
    let solver = GreenSolver::new(tg.at(sp)?, outputs)?;
    let fv: Vec<C64> = solver.nodes().iter().map(|&z| f(z)).collect();
    Ok(solver.solve(&fv).into_iter().map(|p| p.0).collect())
}

/// Cubic interpolation of samples, falling back to linear near the ends.
fn interpolate(f: &GridFunction, z: f64) -> C64 {
    let x = &f.nodes;
    let v = &f.values;
    let n = x.len();
    let k = x.partition_point(|&t| t <= z).clamp(1, n - 1) - 1;
    if n < 4 {
        let t = (z - x[k]) / (x[k + 1] - x[k]);
        return v[k] * (1.0 - t) + v[k + 1] * t;
    }
    let s = k.saturating_sub(1).min(n - 4);
    let mut acc = C64::new(0.0, 0.0);
    for i in s..s + 4 {
        let mut l = 1.0;
        for j in s..s + 4 {
            if j != i {
                l *= (z - x[j]) / (x[i] - x[j]);
            }
        }
        acc += v[i] * l;
    }
    acc
}
