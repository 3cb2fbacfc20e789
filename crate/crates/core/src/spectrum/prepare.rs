use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{build_eigenfunction, Eigenmode};
use super::{discrete_eigenvalues_upto, DEFAULT_MODES};
use crate::data::{DataDiagnostics, DataJets, InitialDataMode};
use crate::error::{Error, Result};
use crate::grid::GridKind;
use crate::profile::Profile;
use crate::quad::unit_rule;
use crate::specfun::{PhysicalParams, Regime, ScaledPair};
use crate::tg::{source_terms, EndpointSolution};

/// Endpoint orthogonality integrals `∫ φ_u F(·, 0)` and `∫ φ_l F(·, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HResiduals {
    /// Divided by `‖φ‖‖F‖`.
    pub r0: f64,
    pub r1: f64,
    pub raw0: C64,
    pub raw1: C64,
}

/// Jets of a profile pair at the nodes of [`unit_rule`].
#[derive(Debug, Clone)]
pub(crate) struct Sampled(Vec<DataJets>);

impl Sampled {
    pub(crate) fn new(omega: &Profile, rho: &Profile) -> Self {
        Sampled(
            unit_rule()
                .par_iter()
                .map(|&(y, _, _)| DataJets { omega: omega.derivatives(y), rho: rho.derivatives(y) })
                .collect(),
        )
    }

    /// `∫ ρ_a ω_b + ω_a ρ_b`.
    pub(crate) fn pairing(&self, other: &Sampled) -> f64 {
        unit_rule()
            .iter()
            .zip(self.0.iter().zip(&other.0))
            .map(|(&(_, _, w), (a, b))| w * (a.rho[0] * b.omega[0] + a.omega[0] * b.rho[0]))
            .sum()
    }

    /// `(∫ ω² + ρ²)^{1/2}`.
    pub(crate) fn norm(&self) -> f64 {
        unit_rule()
            .iter()
            .zip(&self.0)
            .map(|(&(_, _, w), a)| w * (a.omega[0].powi(2) + a.rho[0].powi(2)))
            .sum::<f64>()
            .sqrt()
    }
}

/// `φ_u` and `φ_l` at the nodes of [`unit_rule`].
struct EndpointSamples {
    params: PhysicalParams,
    phi: Vec<(C64, C64)>,
    norms: (f64, f64),
}

impl EndpointSamples {
    fn new(params: PhysicalParams) -> Result<Self> {
        let pair = ScaledPair::new(params);
        let ends = EndpointSolution::new(&pair)?;
        let phi: Vec<(C64, C64)> = unit_rule()
            .iter()
            .map(|&(y, t, _)| Ok((ends.value(y)?, ends.value(t)?)))
            .collect::<Result<_>>()?;
        let (mut a, mut b) = (0.0, 0.0);
        for (&(_, _, w), (u, l)) in unit_rule().iter().zip(&phi) {
            a += w * u.norm_sqr();
            b += w * l.norm_sqr();
        }
        Ok(Self { params, phi, norms: (a.sqrt(), b.sqrt()) })
    }

    /// `∫ φ_u F(·, 0)`, `∫ φ_l F(·, 1)` and the two `‖F‖`.
    fn integrals(&self, s: &Sampled) -> ([C64; 2], [f64; 2]) {
        let mut raw = [C64::new(0.0, 0.0); 2];
        let mut nf = [0.0; 2];
        for ((&(y, t, w), (u, l)), jets) in unit_rule().iter().zip(&self.phi).zip(&s.0) {
            // `ζ = y` at the lower endpoint and `ζ = -t` at the upper one.
            let f0 = source_terms(&self.params, jets, C64::new(y, 0.0)).f;
            let f1 = source_terms(&self.params, jets, C64::new(-t, 0.0)).f;
            raw[0] += w * u * f0;
            raw[1] += w * l * f1;
            nf[0] += w * f0.norm_sqr();
            nf[1] += w * f1.norm_sqr();
        }
        (raw, nf.map(f64::sqrt))
    }

    fn residuals(&self, s: &Sampled) -> HResiduals {
        let (raw, nf) = self.integrals(s);
        let rel = |r: C64, a: f64, b: f64| if a * b > 0.0 { r.norm() / (a * b) } else { 0.0 };
        HResiduals {
            r0: rel(raw[0], self.norms.0, nf[0]),
            r1: rel(raw[1], self.norms.1, nf[1]),
            raw0: raw[0],
            raw1: raw[1],
        }
    }
}

/// Condition (H) residuals of the data.
pub fn check_condition_h(params: PhysicalParams, data: &InitialDataMode) -> Result<HResiduals> {
    Ok(EndpointSamples::new(params)?.residuals(&Sampled::new(&data.omega, &data.rho)))
}

/// Options for [`prepare_data`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepareOptions {
    /// Width of the wall cutoff applied when the raw data do not vanish at
    /// the walls.
    pub cutoff_width: f64,
    pub enforce_h: bool,
    /// Eigenvalue offsets whose modes are removed (both `-q_k` and `1 + q_k`).
    /// Ignored unless `β² > 1/4`; offsets below the bracketing floor are
    /// skipped.
    pub modes: usize,
    pub bump_centers: [f64; 2],
    pub bump_width: f64,
    /// Samples of the returned data.
    pub nodes: usize,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        Self {
            cutoff_width: 0.1,
            enforce_h: true,
            modes: DEFAULT_MODES,
            bump_centers: [0.3, 0.7],
            bump_width: 0.15,
            nodes: crate::data::DEFAULT_SAMPLES,
        }
    }
}

/// Reciprocal condition number below which the bump system is rejected.
pub const BUMP_RCOND: f64 = 1e-10;
/// Wall values below this (relative to the profile size) count as zero. The
/// eigenmodes vanish at the far wall only to about 1e-12.
const WALL_TOL: f64 = 1e-10;

/// Makes raw data admissible: zero at the walls, orthogonal to the endpoint
/// eigenfunctions and free of the first discrete eigenmodes.
pub fn prepare_data(
    params: PhysicalParams,
    omega: Profile,
    rho: Profile,
    opts: &PrepareOptions,
) -> Result<InitialDataMode> {
    let size = sample_size(&omega).max(sample_size(&rho));
    let wall = [omega.value(0.0), omega.value(1.0), rho.value(0.0), rho.value(1.0)]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let cutoff_applied = wall > WALL_TOL * size.max(f64::MIN_POSITIVE);
    let (mut omega, mut rho) = (omega, rho);
    if cutoff_applied {
        let cut = Profile::Cutoff { width: opts.cutoff_width };
        omega = Profile::Product(Box::new(omega), Box::new(cut.clone()));
        rho = Profile::Product(Box::new(rho), Box::new(cut));
    }

    let modes: Vec<Eigenmode> = if params.regime == Regime::SuperQuarter && opts.modes > 0 {
        discrete_eigenvalues_upto(params, opts.modes)?
            .eigenvalues
            .par_iter()
            .map(|e| build_eigenfunction(params, e.c, &[0.0, 1.0]))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mode_samples: Vec<Sampled> = modes
        .iter()
        .map(|m| {
            let (w, r) = m.fields();
            Sampled::new(&w, &r)
        })
        .collect();

    let ends = EndpointSamples::new(params)?;
    let bumps: Vec<Profile> = opts
        .bump_centers
        .iter()
        .map(|&center| Profile::Bump { center, width: opts.bump_width })
        .collect();
    let nb = if opts.enforce_h { 2 } else { 0 };
    let n = nb + modes.len();
    if n > 0 {
        // Columns: bumps added to ρ, then eigenmodes. Rows: the two endpoint
        // integrals, then the left functionals of the modes.
        let rows = |s: &Sampled| -> Vec<C64> {
            let mut v = Vec::with_capacity(n);
            if nb > 0 {
                v.extend(ends.integrals(s).0);
            }
            v.extend(mode_samples.iter().map(|m| C64::new(m.pairing(s), 0.0)));
            v
        };
        let mut cols: Vec<Vec<C64>> =
            bumps.iter().take(nb).map(|b| rows(&Sampled::new(&Profile::Zero, b))).collect();
        cols.extend(mode_samples.iter().map(rows));
        let rhs = rows(&Sampled::new(&omega, &rho));
        if nb > 0 {
            let block = Mat::<C64>::from_fn(2, 2, |i, j| cols[j][i]);
            let sv = block.singular_values().map_err(|_| Error::SingularBumpSystem { rcond: 0.0 })?;
            let rcond = sv[1] / sv[0];
            if !(rcond > BUMP_RCOND) {
                return Err(Error::SingularBumpSystem { rcond });
            }
        }
        let a = Mat::<C64>::from_fn(n, n, |i, j| cols[j][i]);
        let b = Mat::<C64>::from_fn(n, 1, |i, _| -rhs[i]);
        let x = faer::linalg::solvers::Solve::solve(&a.partial_piv_lu(), &b);
        let coef: Vec<f64> = (0..n).map(|i| x[(i, 0)].re).collect();
        let mut w_terms = vec![(1.0, omega)];
        let mut r_terms = vec![(1.0, rho)];
        for (k, b) in bumps.iter().take(nb).enumerate() {
            r_terms.push((coef[k], b.clone()));
        }
        for (k, m) in modes.iter().enumerate() {
            let (w, r) = m.fields();
            w_terms.push((coef[nb + k], w));
            r_terms.push((coef[nb + k], r));
        }
        omega = Profile::Sum(w_terms);
        rho = Profile::Sum(r_terms);
    }

    let nodes = crate::grid::uniform_nodes(opts.nodes);
    // Eigenmode terms are tabulated so that later evaluations stay cheap.
    let mut data = InitialDataMode::on_nodes(omega, rho, nodes, GridKind::Uniform)?.tabulated();
    let sampled = Sampled::new(&data.omega, &data.rho);
    let h = ends.residuals(&sampled);
    let norm = sampled.norm();
    let eig_projections = mode_samples
        .iter()
        .map(|m| C64::new(m.pairing(&sampled) / (m.norm() * norm), 0.0))
        .collect();
    data.diagnostics = DataDiagnostics {
        boundary_residual: data.diagnostics.boundary_residual,
        h_residuals: (h.r0, h.r1),
        eig_projections,
        cutoff_applied,
    };
    Ok(data)
}

fn sample_size(p: &Profile) -> f64 {
    (0..=64).map(|i| p.value(i as f64 / 64.0).abs()).fold(0.0, f64::max)
}
