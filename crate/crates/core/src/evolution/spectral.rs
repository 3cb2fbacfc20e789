use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{EvolutionSeries, Norms, Snapshot};
use crate::data::InitialDataMode;
use crate::error::{Error, Result};
use crate::grid::{uniform_nodes, GridFunction, GridKind};
use crate::profile::ModeField;
use crate::quad::GaussLegendre;
use crate::specfun::{PhysicalParams, Regime};
use crate::spectrum::{
    build_eigenfunction, check_condition_h, discrete_eigenvalues_upto, left_functional, DEFAULT_MODES,
};
use crate::tg::{DerivativeOrder, SpectralPoint, TaylorGoldstein};

/// Quadrature settings for [`evolve_spectral`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSpec {
    /// Distances of the contour from the real axis. Two values are combined
    /// by Richardson extrapolation, assuming an error linear in ε.
    pub eps: Vec<f64>,
    /// Output grid intervals.
    pub nodes: usize,
    /// Largest `y₀` panel as a multiple of ε.
    pub panel_eps: f64,
    /// Gauss nodes per `y₀` panel.
    pub panel_nodes: usize,
    /// Dyadic panels toward the real axis on the vertical sides.
    pub corner_levels: usize,
    /// Relative difference between the two ε evaluations that flags a run.
    pub spread_tol: f64,
    /// Largest endpoint orthogonality residual accepted when `β² ≥ 1/4`.
    pub h_tol: f64,
    /// Discrete eigenvalue offsets whose modes are evolved explicitly.
    pub modes: usize,
    pub snapshots: bool,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            eps: vec![2e-3, 1e-3],
            nodes: 512,
            panel_eps: 2.0,
            panel_nodes: 8,
            corner_levels: 24,
            spread_tol: 0.05,
            h_tol: 1e-6,
            modes: DEFAULT_MODES,
            snapshots: false,
        }
    }
}

/// Series together with the quadrature diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralRun {
    pub series: EvolutionSeries,
    /// `‖ψ(ε₁) - ψ(ε₂)‖ / ‖ψ‖` per time (zeros with a single ε).
    pub spread: Vec<f64>,
    /// Some spread exceeded the tolerance.
    pub flagged: bool,
    /// `(c, a)` for each discrete eigenvalue evolved as `a e^{-imct}` times
    /// its normalized mode.
    pub modes: Vec<(f64, f64)>,
    /// Resolvent solves performed.
    pub solves: usize,
}

/// Stream function, its `y`-derivative and density on the output grid.
#[derive(Debug, Clone)]
struct Fields {
    psi: Vec<C64>,
    dpsi: Vec<C64>,
    rho: Vec<C64>,
}

impl Fields {
    fn zeros(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self { psi: z.clone(), dpsi: z.clone(), rho: z }
    }

    fn parts_mut(&mut self) -> [&mut Vec<C64>; 3] {
        [&mut self.psi, &mut self.dpsi, &mut self.rho]
    }

    fn parts(&self) -> [&Vec<C64>; 3] {
        [&self.psi, &self.dpsi, &self.rho]
    }

    /// `self += a·x + b·conj(x)`.
    fn add_pair(&mut self, x: &Fields, a: C64, b: C64) {
        for (dst, src) in self.parts_mut().into_iter().zip(x.parts()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += a * s + b * s.conj();
            }
        }
    }

    fn combine(&self, a: f64, other: &Fields, b: f64) -> Fields {
        let f = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(u, v)| u * a + v * b).collect();
        Fields {
            psi: f(&self.psi, &other.psi),
            dpsi: f(&self.dpsi, &other.dpsi),
            rho: f(&self.rho, &other.rho),
        }
    }
}

/// One resolvent solve on the contour. The `+` branch at `(y₀, ε)` gives the
/// resolvent at `c = y₀ - iε`; its conjugate is the resolvent at `y₀ + iε`
/// for real data. `lower` and `upper` are the `dc` weights of those points.
#[derive(Debug, Clone, Copy)]
struct ContourNode {
    y0: f64,
    eps: f64,
    lower: C64,
    upper: C64,
}

/// Rectangle `[0, 1] × [-ε, ε]` traversed counterclockwise.
fn contour(eps: f64, width: f64, order: usize, levels: usize) -> Vec<ContourNode> {
    let long = GaussLegendre::new(order);
    let short = GaussLegendre::new(8);
    let mut out = Vec::new();
    let panels = (1.0 / width).ceil().max(1.0) as usize;
    for k in 0..panels {
        let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
        for (y0, w) in long.on(a, b) {
            out.push(ContourNode { y0, eps, lower: C64::new(w, 0.0), upper: C64::new(-w, 0.0) });
        }
    }
    let mut breaks: Vec<f64> = (0..=levels).map(|k| eps * 0.5f64.powi(k as i32)).collect();
    breaks.push(0.0);
    breaks.reverse();
    for w in breaks.windows(2) {
        for (eta, wt) in short.on(w[0], w[1]) {
            // Up the right side, down the left side.
            let right = C64::new(0.0, wt);
            out.push(ContourNode { y0: 1.0, eps: eta, lower: right, upper: right });
            out.push(ContourNode { y0: 0.0, eps: eta, lower: -right, upper: -right });
        }
    }
    out
}

/// Nodes per parallel work unit; partial sums are added in unit order.
const CHUNK: usize = 128;

/// `(1/2πi)∮ e^{-imct}(c - L_m)⁻¹` applied to the data at each time.
fn contour_integral(
    tg: &TaylorGoldstein,
    data: &InitialDataMode,
    outputs: &[f64],
    times: &[f64],
    nodes: &[ContourNode],
) -> Result<Vec<Fields>> {
    let m = tg.params().mf();
    let n = outputs.len();
    let partial = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc: Vec<Fields> = times.iter().map(|_| Fields::zeros(n)).collect();
            for node in chunk {
                let r = tg.resolvent(data, SpectralPoint::plus(node.y0, node.eps), outputs, DerivativeOrder::None)?;
                let x = Fields { psi: r.psi, dpsi: r.dpsi_dy, rho: r.rho };
                for (a, &t) in acc.iter_mut().zip(times) {
                    let lo = C64::new(node.y0, -node.eps);
                    let hi = C64::new(node.y0, node.eps);
                    let ph = |c: C64| (C64::new(0.0, -m * t) * c).exp();
                    a.add_pair(&x, node.lower * ph(lo), node.upper * ph(hi));
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<Vec<Fields>>>>()?;
    let mut total: Vec<Fields> = times.iter().map(|_| Fields::zeros(n)).collect();
    for acc in partial {
        for (tot, a) in total.iter_mut().zip(&acc) {
            tot.add_pair(a, C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        }
    }
    // The resolvent is -(c - L)⁻¹.
    let s = C64::new(0.0, 1.0 / (2.0 * PI));
    for f in &mut total {
        for part in f.parts_mut() {
            for v in part.iter_mut() {
                *v *= s;
            }
        }
    }
    Ok(total)
}

/// Evolution through the spectral representation. See
/// [`evolve_spectral_report`].
pub fn evolve_spectral(
    params: PhysicalParams,
    data: &InitialDataMode,
    times: &[f64],
    quad: &QuadSpec,
) -> Result<EvolutionSeries> {
    Ok(evolve_spectral_report(params, data, times, quad)?.series)
}

/// Evolution of `(ω, ρ)` through the Dunford integral over the boundary of
/// `[0, 1] × [-ε, ε]`, plus the discrete eigenmodes outside it.
///
/// The horizontal sides use panels no wider than `panel_eps·ε` and
/// `π/(4m t_max)`; the vertical sides are graded toward the walls' critical
/// points. Data must satisfy the endpoint orthogonality condition when
/// `β² ≥ 1/4`.
pub fn evolve_spectral_report(
    params: PhysicalParams,
    data: &InitialDataMode,
    times: &[f64],
    quad: &QuadSpec,
) -> Result<SpectralRun> {
    if times.is_empty() || !(times[0] >= 0.0) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("times must be nonnegative and strictly increasing".into()));
    }
    if quad.eps.is_empty() || quad.eps.len() > 2 || quad.eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Quadrature("need one or two positive contour offsets".into()));
    }
    if quad.eps.len() == 2 && quad.eps[0] == quad.eps[1] {
        return Err(Error::Quadrature("the two contour offsets must differ".into()));
    }
    if quad.nodes < 2 || !(quad.panel_eps > 0.0) || quad.panel_nodes == 0 {
        return Err(Error::Quadrature("need at least two output intervals and a positive panel width".into()));
    }
    let outputs = uniform_nodes(quad.nodes);
    let n = outputs.len();
    let mf = params.mf();

    if data.is_zero() {
        let zero = Fields::zeros(n);
        let series = assemble(params, &outputs, times, vec![zero; times.len()], quad.snapshots)?;
        return Ok(SpectralRun {
            series,
            spread: vec![0.0; times.len()],
            flagged: false,
            modes: Vec::new(),
            solves: 0,
        });
    }
    if params.regime != Regime::SubQuarter {
        let h = check_condition_h(params, data)?;
        if !(h.r0.max(h.r1) <= quad.h_tol) {
            return Err(Error::Preparation(format!(
                "endpoint orthogonality residuals {:.3e}, {:.3e} exceed {:.1e}",
                h.r0, h.r1, quad.h_tol
            )));
        }
    }
    let data = data.tabulated();
    let tg = TaylorGoldstein::new(params);
    let t_max = times[times.len() - 1].max(1.0);

    let mut solves = 0;
    let mut runs = Vec::with_capacity(quad.eps.len());
    for &eps in &quad.eps {
        let width = (quad.panel_eps * eps).min(PI / (4.0 * mf * t_max));
        let nodes = contour(eps, width, quad.panel_nodes, quad.corner_levels);
        solves += nodes.len();
        runs.push(contour_integral(&tg, &data, &outputs, times, &nodes)?);
    }

    let l2 = |v: &[C64]| GridFunction { nodes: outputs.clone(), values: v.to_vec(), kind: GridKind::Uniform }.norm_l2();
    let (mut fields, spread) = if runs.len() == 2 {
        let (e1, e2) = (quad.eps[0], quad.eps[1]);
        let (a, b) = (-e2 / (e1 - e2), e1 / (e1 - e2));
        let mut fields = Vec::with_capacity(times.len());
        let mut spread = Vec::with_capacity(times.len());
        for (f1, f2) in runs[0].iter().zip(&runs[1]) {
            let rich = f1.combine(a, f2, b);
            let diff: Vec<C64> = f1.psi.iter().zip(&f2.psi).map(|(u, v)| u - v).collect();
            let size = l2(&rich.psi);
            spread.push(if size > 0.0 { l2(&diff) / size } else { 0.0 });
            fields.push(rich);
        }
        (fields, spread)
    } else {
        (runs.pop().expect("one run"), vec![0.0; times.len()])
    };

    let mut modes = Vec::new();
    if params.regime == Regime::SuperQuarter && quad.modes > 0 {
        let found = discrete_eigenvalues_upto(params, quad.modes)?;
        let built = found
            .eigenvalues
            .par_iter()
            .map(|e| build_eigenfunction(params, e.c, &[0.0, 1.0]))
            .collect::<Result<Vec<_>>>()?;
        for mode in built {
            let (w, r) = mode.fields();
            let amp = left_functional(&mode, &data.omega, &data.rho) / left_functional(&mode, &w, &r);
            modes.push((mode.c, amp));
            let stream = mode.profile(ModeField::Stream);
            let jets: Vec<_> = outputs.iter().map(|&y| (stream.derivatives(y), r.value(y))).collect();
            for (f, &t) in fields.iter_mut().zip(times) {
                let ph = C64::new(0.0, -mf * mode.c * t).exp() * amp;
                for (i, (s, rv)) in jets.iter().enumerate() {
                    f.psi[i] += ph * s[0];
                    f.dpsi[i] += ph * s[1];
                    f.rho[i] += ph * rv;
                }
            }
        }
    }

    let flagged = spread.iter().any(|s| *s > quad.spread_tol);
    let series = assemble(params, &outputs, times, fields, quad.snapshots)?;
    Ok(SpectralRun { series, spread, flagged, modes, solves })
}

fn assemble(
    params: PhysicalParams,
    outputs: &[f64],
    times: &[f64],
    fields: Vec<Fields>,
    snapshots: bool,
) -> Result<EvolutionSeries> {
    let m2 = params.mf() * params.mf();
    let mut norms = Vec::with_capacity(times.len());
    let mut snaps = Vec::new();
    for (f, &t) in fields.into_iter().zip(times) {
        if f.psi.iter().chain(&f.rho).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Quadrature(format!("non-finite field at t = {t}")));
        }
        let grid = |v: Vec<C64>| GridFunction::new(outputs.to_vec(), v, GridKind::Uniform);
        let psi = grid(f.psi)?;
        let dpsi = grid(f.dpsi)?;
        let rho = grid(f.rho)?;
        let omega = dpsi.derivative().sub(&psi.scale(C64::new(m2, 0.0)))?;
        norms.push(Norms {
            vx: dpsi.norm_l2(),
            vy: params.mf() * psi.norm_l2(),
            rho: rho.norm_l2(),
            omega: omega.norm_l2(),
        });
        if snapshots {
            snaps.push(Snapshot { t, psi, rho });
        }
    }
    let mut series = EvolutionSeries::new(times.to_vec(), norms)?;
    if snapshots {
        series.snapshots = Some(snaps);
    }
    Ok(series)
}

/// `v^x = -∂_yψ` by grid differences and `v^y = imψ`.
pub fn velocity_fields(params: PhysicalParams, psi: &GridFunction) -> (GridFunction, GridFunction) {
    let vx = psi.derivative().scale(C64::new(-1.0, 0.0));
    let vy = psi.scale(C64::new(0.0, params.mf()));
    (vx, vy)
}
