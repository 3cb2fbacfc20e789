use std::path::Path;

use ebc_core::evolution::{
    boundary_lap_check, evolve_spectral_report, fit_decay, LapVerdict, Quantity, DEFAULT_FIT_WINDOW,
};
use ebc_core::oracle::{time_step_with, StepOptions};
use ebc_core::spectrum::{prepare_data, spectrum_report, PrepareOptions, EIGEN_TOL};
use ebc_core::validation::{run_suite, Suite};
use ebc_core::{EvolutionSeries, Fit, InitialDataMode, Regime};
use serde::Serialize;

use crate::config::{RunConfig, Solver};
use crate::output::{emit, to_json};
use crate::CliError;

pub const DEFAULT_T_END: f64 = 50.0;
pub const DEFAULT_SAMPLES: usize = 50;

/// Whether every check behind a command held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    CheckFailed,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Passed
        } else {
            Outcome::CheckFailed
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Passed => 0,
            Outcome::CheckFailed => 1,
        }
    }
}

fn initial_data(cfg: &RunConfig) -> Result<InitialDataMode, CliError> {
    let (omega, rho) = cfg.profiles()?;
    if cfg.data.prepare {
        Ok(prepare_data(cfg.params()?, omega, rho, &PrepareOptions::default())?)
    } else {
        Ok(InitialDataMode::new(omega, rho))
    }
}

pub fn run_spectrum(cfg: &RunConfig, count: usize, out: Option<&Path>) -> Result<Outcome, CliError> {
    if count == 0 {
        return Err(CliError::Config("--num-eigs must be positive".into()));
    }
    let report = spectrum_report(cfg.params()?, count)?;
    emit(out, &to_json(&report))?;
    let ok = match report.regime {
        Regime::SuperQuarter => report.eigenvalues.iter().all(|e| e.residual < EIGEN_TOL) && report.interlaced(),
        _ => report.scan.as_ref().is_some_and(|s| s.sign_changes == 0),
    };
    Ok(Outcome::from_ok(ok))
}

#[derive(Debug, Serialize)]
struct EvolveSummary {
    solver: Solver,
    m: u32,
    beta: f64,
    t_end: f64,
    samples: usize,
    /// Largest relative spread between the ε evaluations.
    max_spread: Option<f64>,
    flagged: bool,
    /// `(c, amplitude)` of the discrete modes evolved explicitly.
    modes: Vec<(f64, f64)>,
    fits: Vec<Fit>,
}

/// Sample times `i·t_end/samples`, `i = 0..=samples`.
pub fn sample_times(t_end: f64, samples: usize) -> Vec<f64> {
    (0..=samples).map(|i| t_end * i as f64 / samples as f64).collect()
}

fn fits(series: &EvolutionSeries) -> Vec<Fit> {
    Quantity::ALL.iter().filter_map(|&q| fit_decay(series, q, DEFAULT_FIT_WINDOW).ok()).collect()
}

pub fn run_evolve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let solver = cfg.solver.unwrap_or(Solver::Spectral);
    let t_end = cfg.t_end.unwrap_or(DEFAULT_T_END);
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let times = sample_times(t_end, samples);
    let data = initial_data(cfg)?;
    let (series, max_spread, flagged, modes) = match solver {
        Solver::Spectral => {
            let run = evolve_spectral_report(params, &data, &times, &cfg.quad_spec())?;
            let spread = run.spread.iter().cloned().fold(0.0, f64::max);
            (run.series, Some(spread), run.flagged, run.modes)
        }
        Solver::Oracle => {
            let opts = StepOptions { n: cfg.nodes.unwrap_or(StepOptions::default().n), ..Default::default() };
            (time_step_with(params, &data, &times, &opts)?, None, false, Vec::new())
        }
    };
    emit(cfg.out.as_deref(), &series.to_csv())?;
    let summary = EvolveSummary {
        solver,
        m: cfg.m,
        beta: cfg.beta,
        t_end,
        samples,
        max_spread,
        flagged,
        modes,
        fits: fits(&series),
    };
    match &cfg.report {
        Some(path) => emit(Some(path), &to_json(&summary))?,
        None => eprint!("{}", to_json(&summary)),
    }
    Ok(Outcome::from_ok(!flagged))
}

pub fn run_lap(cfg: &RunConfig, endpoint: Option<f64>, eps_list: &[f64], out: Option<&Path>) -> Result<Outcome, CliError> {
    let data = initial_data(cfg)?;
    let mut table = boundary_lap_check(cfg.params()?, &data, eps_list)?;
    if let Some(y0) = endpoint {
        table.endpoints.retain(|r| r.y0 == y0);
    }
    emit(out, &to_json(&table))?;
    Ok(Outcome::from_ok(table.endpoints.iter().all(|r| r.verdict == LapVerdict::Converging)))
}

pub fn run_validate(suite: Suite, out: Option<&Path>) -> Result<Outcome, CliError> {
    let report = run_suite(suite)?;
    emit(out, &to_json(&report))?;
    Ok(Outcome::from_ok(report.passed))
}
