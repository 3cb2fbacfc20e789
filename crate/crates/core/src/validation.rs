//! Self-checks of a build: special-function identities, Green's function
//! structure, the discrete spectrum and endpoint convergence. Each check
//! reduces to one worst-case number compared against a fixed threshold.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::data::InitialDataMode;
use crate::error::{Error, Result};
use crate::evolution::boundary_lap_check;
use crate::profile::Profile;
use crate::specfun::{gamma_abs_sq, kummer_m, whittaker_m, whittaker_w0, Branch, BranchedArg, PhysicalParams, ScaledPair};
use crate::spectrum::{build_eigenfunction, left_functional, prepare_data, spectrum_report, PrepareOptions, EIGEN_TOL};
use crate::tg::{greens, homogeneous_pair, DerivativeOrder, SpectralPoint, TaylorGoldstein};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Specfun,
    Greens,
    Spectrum,
    Lap,
    All,
}

impl Suite {
    pub const SINGLE: [Suite; 4] = [Suite::Specfun, Suite::Greens, Suite::Spectrum, Suite::Lap];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Greens => "greens",
            Suite::Spectrum => "spectrum",
            Suite::Lap => "lap",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::Specfun, Suite::Greens, Suite::Spectrum, Suite::Lap, Suite::All]
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite {s:?}")))
    }
}

/// How `value` is compared with `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    fn new(suite: Suite, name: &str, value: f64, comparison: Comparison, threshold: f64) -> Self {
        let passed = match comparison {
            Comparison::Below => value < threshold,
            Comparison::AtLeast => value >= threshold,
        };
        Check { suite, name: name.into(), value, threshold, comparison, passed }
    }

    fn below(suite: Suite, name: &str, value: f64, threshold: f64) -> Self {
        Self::new(suite, name, value, Comparison::Below, threshold)
    }

    fn at_least(suite: Suite, name: &str, value: f64, threshold: f64) -> Self {
        Self::new(suite, name, value, Comparison::AtLeast, threshold)
    }

    fn holds(suite: Suite, name: &str, ok: bool) -> Self {
        Self::at_least(suite, name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Runs one suite, or all of them. Evaluation errors inside a check count as
/// a failure of that check; only a broken setup is returned as `Err`.
pub fn run_suite(suite: Suite) -> Result<ValidationReport> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::SINGLE.to_vec() } else { vec![suite] };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(match s {
            Suite::Specfun => specfun_checks(),
            Suite::Greens => greens_checks(),
            Suite::Spectrum => spectrum_checks()?,
            Suite::Lap => lap_checks()?,
            Suite::All => unreachable!(),
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { checks, passed })
}

const IDENTITY_TOL: f64 = 1e-10;
const BRACKET_TOL: f64 = 1e-8;
const EULER: f64 = 0.577_215_664_901_532_9;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Largest value produced by `f`; an evaluation error gives infinity.
fn worst<I: IntoIterator>(items: I, f: impl Fn(I::Item) -> Result<f64>) -> f64 {
    items.into_iter().map(|x| f(x).unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- specfun

const MODES: [u32; 5] = [1, 2, 4, 8, 16];

/// `2m(x ± iε)` for `|x| ≤ 1.25` plus generic points, all with `2m|ζ| ≤ 40`.
fn sample_args(m: u32) -> Vec<C64> {
    let s = 2.0 * m as f64;
    let mut out = Vec::new();
    for &x in &[-1.2, -0.7, -0.31, -0.05, 0.02, 0.15, 0.5, 0.93, 1.2] {
        for &e in &[1e-3, 1e-2, 0.1] {
            for sign in [1.0, -1.0] {
                let z = c(x, sign * e) * s;
                if z.norm() <= 40.0 {
                    out.push(z);
                }
            }
        }
    }
    out.extend([c(0.4, 0.2), c(-1.3, 2.1), c(3.0, -2.5), c(-0.2, -0.9)]);
    out
}

fn gammas() -> [C64; 6] {
    [c(0.3, 0.0), c(-0.3, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.0, 0.0), c(0.0, 0.866_025_403_784_438_6)]
}

/// `M_{0,γ}(ζ)` from the modified Bessel series of order `γ`, without the
/// common factor `Γ(1+γ)`.
fn m_from_bessel(gamma: C64, zeta: C64) -> C64 {
    let z = zeta / 2.0;
    let q = z * z / 4.0;
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    for k in 1..400 {
        term = term * q / (k as f64 * (gamma + k as f64));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() && k > 10 {
            break;
        }
    }
    c(2.0, 0.0).powc(2.0 * gamma + 0.5) * z.sqrt() * (z / 2.0).powc(gamma) * sum
}

/// `K₀(z)`, `Re z > 0`, from `∫₀^∞ exp(-z cosh t) dt` by the trapezoid rule.
fn k0_integral(z: C64) -> C64 {
    let h = 0.005;
    let mut s = 0.5 * (-z).exp();
    let mut t: f64 = h;
    loop {
        let term = (-z * t.cosh()).exp();
        s += term;
        if term.norm() < 1e-30 {
            break;
        }
        t += h;
    }
    s * h
}

fn specfun_checks() -> Vec<Check> {
    let s = Suite::Specfun;
    let args: Vec<(u32, C64)> = MODES.iter().flat_map(|&m| sample_args(m).into_iter().map(move |z| (m, z))).collect();

    let bessel = worst(&args, |&(_, z)| {
        let mut w = 0.0f64;
        for g in gammas() {
            // The reference series cancels badly for large |ζ| in the left half plane.
            if z.norm() > 24.0 && z.re < 0.0 {
                continue;
            }
            w = w.max(rel(whittaker_m(g, BranchedArg::new(z))?.value, m_from_bessel(g, z)));
        }
        Ok(w)
    });

    let mut k0_points: Vec<C64> = [0.05, 0.3, 1.0, 2.5, 7.0, 13.0, 20.0].iter().map(|&x| c(x, 0.0)).collect();
    k0_points.extend([c(0.5, 0.3), c(3.0, -4.0), c(10.0, 12.0), c(1.0, 0.02), c(0.2, -6.0)]);
    let k0 = worst(&k0_points, |&z| {
        let w = whittaker_w0(BranchedArg::new(2.0 * z))?.value;
        Ok(rel(w, (2.0 * z / PI).sqrt() * k0_integral(z)))
    });

    let m_cont = worst(gammas(), |g| {
        let mut w = 0.0f64;
        for (z, s) in [(c(0.4, -0.2), 1.0), (c(1.5, -0.01), 1.0), (c(-3.0, -2.0), 1.0), (c(0.4, 0.2), -1.0), (c(-2.0, 0.5), -1.0)] {
            let base = whittaker_m(g, BranchedArg::new(z))?.value;
            let rotated = whittaker_m(g, BranchedArg::new(-z))?.value;
            w = w.max(rel(rotated, c(0.0, s) * (g * c(0.0, s * PI)).exp() * base));
        }
        for x in [0.3, 1.0, 12.0] {
            let base = whittaker_m(g, BranchedArg::real(x))?.value;
            for (b, s) in [(Branch::Plus, 1.0), (Branch::Minus, -1.0)] {
                let cut = whittaker_m(g, BranchedArg::with_branch(c(-x, 0.0), b))?.value;
                w = w.max(rel(cut, c(0.0, s) * (g * c(0.0, s * PI)).exp() * base));
            }
        }
        Ok(w)
    });

    let w_cont = worst([0.3, 2.0, 5.0, 17.0], |x| {
        let m = whittaker_m(c(0.0, 0.0), BranchedArg::real(x))?.value;
        let w = whittaker_w0(BranchedArg::real(x))?.value;
        let mut out = 0.0f64;
        for (b, s) in [(Branch::Plus, 1.0), (Branch::Minus, -1.0)] {
            let cut = whittaker_w0(BranchedArg::with_branch(c(-x, 0.0), b))?.value;
            out = out.max(rel(cut, PI.sqrt() * m + c(0.0, s) * w));
        }
        Ok(out)
    });

    let conj = worst(&args, |&(_, z)| {
        let mut w = 0.0f64;
        for nu in [0.5, 0.866_025_403_784_438_6, 2.0] {
            let a = whittaker_m(c(0.0, nu), BranchedArg::new(z))?;
            let b = whittaker_m(c(0.0, -nu), BranchedArg::new(z.conj()))?.conj();
            w = w.max(rel(a.value, b.value)).max(rel(a.derivative, b.derivative));
        }
        for mu in [0.0, 0.3] {
            let a = whittaker_m(c(mu, 0.0), BranchedArg::new(z))?.value;
            let b = whittaker_m(c(mu, 0.0), BranchedArg::new(z.conj()))?.value.conj();
            w = w.max(rel(a, b));
        }
        let a = whittaker_w0(BranchedArg::new(z))?.value;
        let b = whittaker_w0(BranchedArg::new(z.conj()))?.value.conj();
        Ok(w.max(rel(a, b)))
    });

    // Measured against the larger of the two products, the only scale on
    // which the identity can hold once the pair grows like e^{m|ζ|}.
    let wronskian = worst(MODES.iter().flat_map(|&m| [0.2, 0.5, 1.0, 3.0].map(|b| (m, b))), |(m, beta)| {
        let pair = ScaledPair::new(PhysicalParams::new(m, beta)?);
        let w0 = pair.wronskian();
        let mut out = 0.0f64;
        for s in [0.05, 0.4, 1.3, 3.1, 5.0, 9.0, 17.0, 26.0, 33.0, 40.0] {
            let x = s / (2.0 * m as f64);
            for arg in [BranchedArg::new(c(x, 1e-3)), BranchedArg::new(c(-x, -1e-2)), BranchedArg::real(x)] {
                let e = pair.eval(arg)?;
                let a = e.first.value * e.second.derivative;
                let b = e.first.derivative * e.second.value;
                out = out.max((a - b - w0).norm() / a.norm().max(b.norm()).max(w0.norm()));
            }
        }
        Ok(out)
    });

    // Relative violation of each bracket, zero when it holds.
    let brackets = worst([0.01, 0.2, 0.5, 1.0, 1.7, 2.0], |x: f64| {
        let mu = 0.3;
        let mut v = 0.0f64;
        let km = kummer_m(c(0.5 + mu, 0.0), c(1.0 + 2.0 * mu, 0.0), c(x, 0.0))?.re;
        v = v.max(((x / 2.0).exp() - km) / (x / 2.0).exp());
        let wm = whittaker_m(c(mu, 0.0), BranchedArg::real(x))?.value.re;
        v = v.max((x.powf(0.5 + mu) - wm) / x.powf(0.5 + mu));
        for nu in [0.2, 0.5, 1.0, 3.0] {
            let a = whittaker_m(c(0.0, nu), BranchedArg::real(x))?.value.norm_sqr();
            let lo = x * gamma_abs_sq(nu) * (PI * nu).sinh() / (PI * nu);
            let hi = x * x.cosh();
            v = v.max((lo - a) / lo).max((a - hi) / hi);
        }
        Ok(v.max(0.0))
    });

    vec![
        Check::below(s, "bessel_m", bessel, IDENTITY_TOL),
        Check::below(s, "w0_k0", k0, IDENTITY_TOL),
        Check::below(s, "m_continuation", m_cont, IDENTITY_TOL),
        Check::below(s, "w0_continuation", w_cont, IDENTITY_TOL),
        Check::below(s, "conjugation", conj, IDENTITY_TOL),
        Check::below(s, "wronskian_constancy", wronskian, IDENTITY_TOL),
        Check::below(s, "lower_bounds", brackets, BRACKET_TOL),
        Check::below(s, "k0_small_argument", small_w0().unwrap_or(f64::INFINITY), 1e-2),
    ]
}

/// `W₀(z)` against its logarithmic leading term at `z = 1e-6`.
fn small_w0() -> Result<f64> {
    let z: f64 = 1e-6;
    let w = whittaker_w0(BranchedArg::real(z))?.value;
    let lead = (z / PI).sqrt() * (2.0 * 2f64.ln() - EULER - z.ln());
    Ok((w.re / lead - 1.0).abs().max(w.im.abs()))
}

// ----------------------------------------------------------------- greens

const REGIMES: [f64; 3] = [0.1, 0.25, 1.0];
const FD_TOL: f64 = 1e-5;

fn params(m: u32, beta2: f64) -> Result<PhysicalParams> {
    PhysicalParams::new(m, beta2.sqrt())
}

fn greens_cases() -> Vec<(f64, u32)> {
    REGIMES.iter().flat_map(|&b| [1, 2, 4, 8].map(|m| (b, m))).collect()
}

fn greens_checks() -> Vec<Check> {
    let s = Suite::Greens;
    let cases = greens_cases();
    let points = [(0.3, 1e-2), (0.5, 1e-3), (0.9, 1e-4), (-0.2, 0.0)];

    let dirichlet = worst(&cases, |&(b2, m)| {
        let p = params(m, b2)?;
        let mut out = 0.0f64;
        for (y0, eps) in points {
            let sp = SpectralPoint::plus(y0, eps);
            let mut scale = 0.0f64;
            for i in 0..=10 {
                let (u, l) = homogeneous_pair(p, sp, i as f64 / 10.0)?;
                scale = scale.max(u.value.norm()).max(l.value.norm());
            }
            let (u1, _) = homogeneous_pair(p, sp, 1.0)?;
            let (_, l0) = homogeneous_pair(p, sp, 0.0)?;
            out = out.max(u1.value.norm() / scale).max(l0.value.norm() / scale);
        }
        Ok(out)
    });

    let pairs = [(0.3, 0.7), (0.1, 0.45), (0.55, 0.95)];
    let symmetry = worst(&cases, |&(b2, m)| {
        let p = params(m, b2)?;
        let mut out = 0.0f64;
        for (y0, eps) in points {
            let sp = SpectralPoint::plus(y0, eps);
            for (y, z) in pairs {
                let a = greens(p, sp, y, z)?;
                let b = greens(p, sp, z, y)?;
                out = out.max(rel(a.g, b.g)).max(rel(a.dg_dy, b.dg_dz));
            }
        }
        Ok(out)
    });

    let conjugation = worst(&cases, |&(b2, m)| {
        let p = params(m, b2)?;
        let mut out = 0.0f64;
        for (y0, eps) in points {
            let sp = SpectralPoint::plus(y0, eps);
            for (y, z) in pairs {
                out = out.max(rel(greens(p, sp, y, z)?.g, greens(p, sp.conj(), y, z)?.g.conj()));
            }
        }
        Ok(out)
    });

    let residual = worst(&cases, |&(b2, m)| {
        let p = params(m, b2)?;
        let mut out = 0.0f64;
        for (y0, eps) in [(0.3, 1e-2), (0.5, 1e-3), (0.7, 1e-3)] {
            let sp = SpectralPoint::minus(y0, eps);
            for y in [0.1, 0.25, 0.5, 0.62, 0.9] {
                let zeta = sp.zeta(y).zeta;
                let h = zeta.norm() / 200.0;
                for which in [0, 1] {
                    let f = |x: f64| -> Result<C64> {
                        let (u, l) = homogeneous_pair(p, sp, x)?;
                        Ok(if which == 0 { u.value } else { l.value })
                    };
                    let d2 = (-f(y + 2.0 * h)? + 16.0 * f(y + h)? - 30.0 * f(y)? + 16.0 * f(y - h)? - f(y - 2.0 * h)?)
                        / (12.0 * h * h);
                    let phi = f(y)?;
                    let m2 = p.mf() * p.mf();
                    let pot = p.beta2() * phi / (zeta * zeta);
                    let r = d2 - m2 * phi + pot;
                    out = out.max(r.norm() / d2.norm().max(m2 * phi.norm()).max(pot.norm()));
                }
            }
        }
        Ok(out)
    });

    let resolvent = worst(REGIMES, |b2| {
        let p = params(2, b2)?;
        let tg = TaylorGoldstein::new(p);
        let data = InitialDataMode::new(Profile::Sine { k: 1 }, Profile::Bump { center: 0.4, width: 0.3 });
        let nodes = data.nodes();
        let mut out = 0.0f64;
        for (y0, eps) in [(0.3, 1e-2), (0.6, 1e-3)] {
            let a = tg.resolvent(&data, SpectralPoint::plus(y0, eps), nodes, DerivativeOrder::None)?;
            let b = tg.resolvent(&data, SpectralPoint::minus(y0, eps), nodes, DerivativeOrder::None)?;
            let (pa, pb) = (a.psi_grid(), b.psi_grid());
            let scale = pa.max_abs();
            for (x, y) in pa.values.iter().zip(&pb.values) {
                out = out.max((x - y.conj()).norm() / scale);
            }
        }
        Ok(out)
    });

    vec![
        Check::below(s, "dirichlet", dirichlet, IDENTITY_TOL),
        Check::below(s, "symmetry", symmetry, IDENTITY_TOL),
        Check::below(s, "conjugation", conjugation, IDENTITY_TOL),
        Check::below(s, "tg_residual", residual, FD_TOL),
        Check::below(s, "resolvent_conjugation", resolvent, IDENTITY_TOL),
    ]
}

// --------------------------------------------------------------- spectrum

const PHASE_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-8;

fn spectrum_checks() -> Result<Vec<Check>> {
    let s = Suite::Spectrum;
    let p = PhysicalParams::new(1, 1.0)?;
    let report = spectrum_report(p, 3)?;
    let below: Vec<_> = report.eigenvalues.iter().filter(|e| e.c < 0.0).collect();
    let phase = below.iter().map(|e| e.residual).fold(0.0, f64::max);
    let decreasing = report.offsets().windows(2).all(|w| w[1] < w[0]);

    let modes: Vec<_> = report
        .eigenvalues
        .iter()
        .map(|e| build_eigenfunction(p, e.c, &[0.0, 1.0]))
        .collect::<Result<_>>()?;
    let boundary = modes.iter().map(|m| m.boundary_residual).fold(0.0, f64::max);
    let mut ortho = 0.0f64;
    for (i, a) in modes.iter().enumerate() {
        for (j, b) in modes.iter().enumerate() {
            if i != j {
                let (w, r) = b.fields();
                let scale = (a.norm_sq() * b.norm_sq()).sqrt();
                ortho = ortho.max(left_functional(a, &w, &r).abs() / scale);
            }
        }
    }

    let sub = spectrum_report(PhysicalParams::new(1, 0.1f64.sqrt())?, 3)?;
    Ok(vec![
        Check::at_least(s, "eigenvalue_count", below.len() as f64, 3.0),
        Check::holds(s, "ordered", decreasing),
        Check::below(s, "phase_residual", phase, PHASE_TOL),
        Check::holds(s, "interlacing", report.interlaced() && !report.peaks.is_empty()),
        Check::below(s, "boundary_residual", boundary, EIGEN_TOL),
        Check::below(s, "left_orthogonality", ortho, ORTHO_TOL),
        Check::below(s, "subcritical_empty", sub.eigenvalues.len() as f64, 1.0),
    ])
}

// -------------------------------------------------------------------- lap

const LAP_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Slack below `min(2μ, 1/2)` allowed for the observed subcritical order.
const RATE_SLACK: f64 = 0.1;

fn lap_checks() -> Result<Vec<Check>> {
    let s = Suite::Lap;
    let p = PhysicalParams::new(1, 1.0)?;
    let raw = InitialDataMode::new(Profile::Sine { k: 1 }, Profile::Zero);
    let prepared = prepare_data(p, Profile::Sine { k: 1 }, Profile::Zero, &PrepareOptions::default())?;
    let good = boundary_lap_check(p, &prepared, &LAP_EPS)?;
    let bad = boundary_lap_check(p, &raw, &LAP_EPS)?;

    let sub = PhysicalParams::new(1, 0.1f64.sqrt())?;
    let table = boundary_lap_check(sub, &raw, &LAP_EPS)?;
    let expected = table.expected_rate.unwrap_or(0.5);
    let rate = table.endpoints.iter().flat_map(|r| r.rates.iter().copied()).fold(f64::INFINITY, f64::min);

    Ok(vec![
        Check::at_least(s, "prepared_drop", good.endpoints.iter().map(|r| r.drop).fold(f64::INFINITY, f64::min), 10.0),
        Check::below(s, "violated_drop", bad.endpoints.iter().map(|r| r.drop).fold(0.0, f64::max), 3.0),
        Check::at_least(s, "subcritical_rate", rate, expected - RATE_SLACK),
    ])
}
