//! Run configuration read from JSON.

use std::path::{Path, PathBuf};

use ebc_core::evolution::QuadSpec;
use ebc_core::{PhysicalParams, Profile};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Chebyshev degree used for file profiles unless the config says otherwise.
pub const DEFAULT_FIT_DEGREE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Spectral,
    Oracle,
}

/// A built-in profile name or a two-column `y,value` CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Named(String),
    File {
        file: PathBuf,
        #[serde(default)]
        degree: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    #[serde(default = "sin_pi")]
    pub omega0: ProfileSpec,
    #[serde(default = "zero")]
    pub rho0: ProfileSpec,
    #[serde(default = "yes")]
    pub prepare: bool,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self { omega0: sin_pi(), rho0: zero(), prepare: true }
    }
}

fn sin_pi() -> ProfileSpec {
    ProfileSpec::Named("sin_pi".into())
}

fn zero() -> ProfileSpec {
    ProfileSpec::Named("zero".into())
}

fn yes() -> bool {
    true
}

fn default_eps() -> Vec<f64> {
    QuadSpec::default().eps
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative spread between the two ε evaluations that flags a run.
    pub spread: Option<f64>,
    /// Endpoint orthogonality residual accepted by the spectral solver.
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: u32,
    pub beta: f64,
    #[serde(default)]
    pub data: DataSpec,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub solver: Option<Solver>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Output grid intervals.
    #[serde(default)]
    pub nodes: Option<usize>,
    /// CSV series path.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// JSON summary path.
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Directory that relative profile paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn new(m: u32, beta: f64) -> Self {
        Self {
            m,
            beta,
            data: DataSpec::default(),
            eps: default_eps(),
            solver: None,
            t_end: None,
            samples: None,
            nodes: None,
            out: None,
            report: None,
            tolerances: Tolerances::default(),
            base_dir: PathBuf::from("."),
        }
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, &base)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if self.eps.is_empty() || self.eps.len() > 2 || self.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(CliError::Config("eps must hold one or two positive values".into()));
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("t_end must be positive, got {t}")));
            }
        }
        if self.samples == Some(0) {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        if let Some(n) = self.nodes {
            if n < 8 {
                return Err(CliError::Config(format!("nodes must be at least 8, got {n}")));
            }
        }
        for (key, value) in [("spread", self.tolerances.spread), ("h", self.tolerances.h)] {
            if value.is_some_and(|v| !(v > 0.0)) {
                return Err(CliError::Config(format!("tolerance {key} must be positive")));
            }
        }
        self.profiles()?;
        Ok(())
    }

    pub fn params(&self) -> Result<PhysicalParams, CliError> {
        PhysicalParams::new(self.m, self.beta).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn profiles(&self) -> Result<(Profile, Profile), CliError> {
        Ok((self.resolve(&self.data.omega0)?, self.resolve(&self.data.rho0)?))
    }

    fn resolve(&self, spec: &ProfileSpec) -> Result<Profile, CliError> {
        match spec {
            ProfileSpec::Named(name) => Profile::named(name)
                .ok_or_else(|| CliError::Config(format!("unknown profile {name:?} (expected sin_pi, bump or zero)"))),
            ProfileSpec::File { file, degree } => {
                let path = self.base_dir.join(file);
                let samples = read_samples(&path)?;
                let degree = degree.unwrap_or(DEFAULT_FIT_DEGREE).min(samples.len().saturating_sub(1));
                Profile::fit_samples(&samples, degree).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
        }
    }

    pub fn quad_spec(&self) -> QuadSpec {
        let mut q = QuadSpec { eps: self.eps.clone(), ..Default::default() };
        if let Some(n) = self.nodes {
            q.nodes = n;
        }
        if let Some(s) = self.tolerances.spread {
            q.spread_tol = s;
        }
        if let Some(h) = self.tolerances.h {
            q.h_tol = h;
        }
        q
    }
}

/// Two-column `y,value` samples; a non-numeric first row is taken as a header.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if record.len() != 2 {
            return Err(CliError::Config(format!("{}: row {} needs two columns", path.display(), i + 1)));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(y), Ok(v)) => out.push((y, v)),
            _ if i == 0 => continue,
            _ => return Err(CliError::Config(format!("{}: row {} is not numeric", path.display(), i + 1))),
        }
    }
    Ok(out)
}
