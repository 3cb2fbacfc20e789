//! Discrete eigenvalues, eigenmodes, the endpoint orthogonality condition and
//! preparation of initial data.

mod eigen;
mod prepare;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{BranchedArg, PhaseFunction, PhysicalParams, Regime, ScaledPair};
use crate::tg::{SpectralPoint, TaylorGoldstein};

pub use eigen::{build_eigenfunction, left_functional, Eigenmode, EIGEN_TOL};
pub use prepare::{check_condition_h, prepare_data, HResiduals, PrepareOptions};

/// Number of eigenvalue offsets computed when none is requested.
pub const DEFAULT_MODES: usize = 5;
/// Smallest offset on the bracketing grid.
pub const BRACKET_FLOOR: f64 = 1e-8;
const BRACKET_POINTS: usize = 400;

/// `r(c) = Θ(1 + c) - Θ(c)` for `β² > 1/4`.
#[derive(Debug, Clone)]
pub struct RFunction {
    phase: PhaseFunction,
}

impl RFunction {
    pub fn new(params: PhysicalParams) -> Result<Self> {
        Ok(Self { phase: PhaseFunction::new(params)? })
    }

    pub fn params(&self) -> &PhysicalParams {
        self.phase.params()
    }

    pub fn value(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("r(c) needs c > 0, got {c}")));
        }
        self.phase.increment(c, 1.0 + c)
    }

    pub fn derivative(&self, c: f64) -> f64 {
        self.phase.derivative(1.0 + c) - self.phase.derivative(c)
    }

    /// Offset `c` with `r(c) = level` inside `[lo, hi]`, where `r - level`
    /// changes sign. Bisection to relative width 1e-13, then guarded Newton.
    fn solve(&self, level: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
        let g = |c: f64| self.value(c).map(|r| r - level);
        let g_lo = g(lo)?;
        if g_lo * g(hi)? > 0.0 {
            return Err(Error::Convergence(format!("level {level} is not bracketed by [{lo}, {hi}]")));
        }
        for _ in 0..200 {
            if hi - lo <= 1e-13 * lo {
                break;
            }
            let mid = (lo * hi).sqrt().max(0.5 * (lo + hi) * f64::EPSILON).clamp(lo, hi);
            let mid = if hi / lo < 4.0 { 0.5 * (lo + hi) } else { mid };
            let gm = g(mid)?;
            if gm == 0.0 {
                return Ok(mid);
            }
            if (gm > 0.0) == (g_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut c = 0.5 * (lo + hi);
        for _ in 0..3 {
            let step = g(c)? / self.derivative(c);
            let next = c - step;
            if !(next > lo * (1.0 - 1e-9) && next < hi * (1.0 + 1e-9)) {
                break;
            }
            c = next;
        }
        Ok(c)
    }
}

/// `r(c)` for the given parameters.
pub fn r_function(params: PhysicalParams, c: f64) -> Result<f64> {
    RFunction::new(params)?.value(c)
}

/// One discrete eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub c: f64,
    /// `|r(q) - kπ|` for the offset `q` this eigenvalue comes from.
    pub residual: f64,
    /// Position of the offset, counted from the largest.
    pub k: usize,
    /// `r(q)/π`.
    pub label: f64,
    pub offset: f64,
    /// `|W(q)| / (|M_+(q)||M_+(1 + q)|)`.
    pub wronskian_residual: f64,
}

/// Offset with `r(p) = (k + 1/2)π`, where `|W|` peaks between eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub p: f64,
    pub k: usize,
}

/// Result of scanning the real Wronskian next to the essential spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCertificate {
    pub points: usize,
    /// Sign changes of the real Wronskian on `(-β/m, 0)`.
    pub sign_changes: usize,
    /// Smallest `|W|` relative to the size of its two products, over both
    /// intervals `(-β/m, 0)` and `(1, 1 + β/m)`.
    pub min_relative_wronskian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub essential: [f64; 2],
    pub regime: Regime,
    pub eigenvalues: Vec<Eigenvalue>,
    pub peaks: Vec<Peak>,
    pub scan: Option<ScanCertificate>,
}

impl SpectrumReport {
    /// Offsets `q_1 > q_2 > …`.
    pub fn offsets(&self) -> Vec<f64> {
        let mut q: Vec<f64> = self.eigenvalues.iter().filter(|e| e.c < 0.0).map(|e| e.offset).collect();
        q.sort_by(|a, b| b.partial_cmp(a).unwrap());
        q
    }

    /// `q_{k+1} < p_k < q_k` for every computed `k`.
    pub fn interlaced(&self) -> bool {
        let q = self.offsets();
        self.peaks.iter().all(|p| {
            let upper = q.get(p.k - 1).copied().unwrap_or(f64::INFINITY);
            let lower = q.get(p.k).copied().unwrap_or(0.0);
            lower < p.p && p.p < upper
        })
    }
}

/// `|W(-q)| / (|M_+(q)||M_+(1 + q)|)` at `y₀ = -q`, `ε = 0`.
pub fn offset_wronskian_residual(tg: &TaylorGoldstein, q: f64) -> Result<f64> {
    let hom = tg.at(SpectralPoint::plus(-q, 0.0))?;
    let pair = tg.pair();
    let (a, _) = pair.values(BranchedArg::real(q))?;
    let (b, _) = pair.values(BranchedArg::real(1.0 + q))?;
    Ok(hom.wronskian().norm() / (a.norm() * b.norm()))
}

/// The first `count` discrete eigenvalue offsets, their mirrored
/// eigenvalues `-q_k`, `1 + q_k` and the peaks between them.
pub fn find_discrete_eigenvalues(params: PhysicalParams, count: usize) -> Result<SpectrumReport> {
    search(params, count, true)
}

/// As [`find_discrete_eigenvalues`], stopping quietly at the offsets that lie
/// above [`BRACKET_FLOOR`].
pub fn discrete_eigenvalues_upto(params: PhysicalParams, count: usize) -> Result<SpectrumReport> {
    search(params, count, false)
}

fn search(params: PhysicalParams, count: usize, strict: bool) -> Result<SpectrumReport> {
    if params.regime != Regime::SuperQuarter {
        return Err(Error::Regime { expected: "SuperQuarter" });
    }
    if count == 0 {
        return Err(Error::InvalidParams("at least one eigenvalue must be requested".into()));
    }
    let r = RFunction::new(params)?;
    // The top of the grid must sit below the first level π/2 so that every
    // peak and eigenvalue offset is bracketed.
    let mut hi = params.beta / params.mf();
    let limit = ScaledPair::new(params).max_modulus() - 1.0;
    while r.value(hi)? >= 0.5 * std::f64::consts::PI {
        hi *= 2.0;
        if hi > limit {
            return Err(Error::Convergence("r(c) stays above π/2 inside the series domain".into()));
        }
    }
    let grid: Vec<f64> = (0..BRACKET_POINTS)
        .map(|i| BRACKET_FLOOR * (hi / BRACKET_FLOOR).powf(i as f64 / (BRACKET_POINTS - 1) as f64))
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&c| r.value(c)).collect::<Result<_>>()?;

    let bracket = |level: f64| -> Option<(f64, f64)> {
        (0..grid.len() - 1)
            .find(|&i| (values[i] - level) * (values[i + 1] - level) <= 0.0)
            .map(|i| (grid[i], grid[i + 1]))
    };
    let pi = std::f64::consts::PI;
    let mut levels = Vec::new();
    for k in 1..=count {
        let level = k as f64 * pi;
        let Some((lo, hi)) = bracket(level) else {
            if strict {
                return Err(Error::Convergence(format!(
                    "only {} eigenvalue offsets above {BRACKET_FLOOR:e}",
                    k - 1
                )));
            }
            break;
        };
        levels.push((k, level, lo, hi, false));
        if let Some((lo, hi)) = bracket(level + 0.5 * pi) {
            levels.push((k, level + 0.5 * pi, lo, hi, true));
        }
    }
    let roots: Vec<(usize, f64, f64, bool)> = levels
        .par_iter()
        .map(|&(k, level, lo, hi, peak)| r.solve(level, lo, hi).map(|c| (k, level, c, peak)))
        .collect::<Result<_>>()?;

    let tg = TaylorGoldstein::new(params);
    let mut eigenvalues = Vec::new();
    let mut peaks = Vec::new();
    for (k, level, c, peak) in roots {
        if peak {
            peaks.push(Peak { p: c, k });
            continue;
        }
        let rv = r.value(c)?;
        let wr = offset_wronskian_residual(&tg, c)?;
        for ev in [-c, 1.0 + c] {
            eigenvalues.push(Eigenvalue {
                c: ev,
                residual: (rv - level).abs(),
                k,
                label: rv / pi,
                offset: c,
                wronskian_residual: wr,
            });
        }
    }
    Ok(SpectrumReport { essential: [0.0, 1.0], regime: params.regime, eigenvalues, peaks, scan: None })
}

/// Scans the real Wronskian on `(-β/m, 0)` and `(1, 1 + β/m)`.
pub fn scan_wronskian(params: PhysicalParams) -> Result<ScanCertificate> {
    let tg = TaylorGoldstein::new(params);
    let reach = params.beta / params.mf();
    let offsets: Vec<f64> = (0..BRACKET_POINTS)
        .map(|i| BRACKET_FLOOR * (reach / BRACKET_FLOOR).powf(i as f64 / BRACKET_POINTS as f64))
        .collect();
    let eval = |y0: f64| -> Result<(f64, f64)> {
        let hom = tg.at(SpectralPoint::plus(y0, 0.0))?;
        let w = hom.wronskian();
        Ok((w.re, w.norm() / hom.scale()))
    };
    let left: Vec<(f64, f64)> = offsets.par_iter().map(|&q| eval(-q)).collect::<Result<_>>()?;
    let right: Vec<(f64, f64)> = offsets.par_iter().map(|&q| eval(1.0 + q)).collect::<Result<_>>()?;
    let sign_changes = left.windows(2).filter(|w| w[0].0 * w[1].0 < 0.0).count();
    let min_relative_wronskian = left.iter().chain(&right).map(|v| v.1).fold(f64::INFINITY, f64::min);
    Ok(ScanCertificate { points: 2 * offsets.len(), sign_changes, min_relative_wronskian })
}

/// Eigenvalues for `β² > 1/4`, otherwise an empty list with a scan
/// certificate.
pub fn spectrum_report(params: PhysicalParams, count: usize) -> Result<SpectrumReport> {
    if params.regime == Regime::SuperQuarter {
        return find_discrete_eigenvalues(params, count);
    }
    Ok(SpectrumReport {
        essential: [0.0, 1.0],
        regime: params.regime,
        eigenvalues: Vec::new(),
        peaks: Vec::new(),
        scan: Some(scan_wronskian(params)?),
    })
}
