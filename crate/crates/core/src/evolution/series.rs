use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `L²` norms of the velocity components, density and vorticity at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Norms {
    pub vx: f64,
    pub vy: f64,
    pub rho: f64,
    pub omega: f64,
}

/// Which norm of a series to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Vx,
    Vy,
    Rho,
    Omega,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::Vx, Quantity::Vy, Quantity::Rho, Quantity::Omega];

    pub fn of(self, n: &Norms) -> f64 {
        match self {
            Quantity::Vx => n.vx,
            Quantity::Vy => n.vy,
            Quantity::Rho => n.rho,
            Quantity::Omega => n.omega,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Vx => "vx",
            Quantity::Vy => "vy",
            Quantity::Rho => "rho",
            Quantity::Omega => "omega",
        }
    }
}

/// Stream function and density at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub psi: GridFunction,
    pub rho: GridFunction,
}

/// Power-law fit of one norm over a time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub quantity: Quantity,
    pub window: [f64; 2],
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// `norm·t^{1/2}/(1 + log t)` at the fitted times; bounded in the
    /// critical regime.
    pub log_ratio: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvolutionSeries {
    pub times: Vec<f64>,
    pub norms: Vec<Norms>,
    pub snapshots: Option<Vec<Snapshot>>,
    pub fits: Vec<Fit>,
}

impl EvolutionSeries {
    pub fn new(times: Vec<f64>, norms: Vec<Norms>) -> Result<Self> {
        if times.len() != norms.len() {
            return Err(Error::InvalidParams(format!("{} times but {} norms", times.len(), norms.len())));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("times must be strictly increasing".into()));
        }
        Ok(Self { times, norms, snapshots: None, fits: Vec::new() })
    }

    pub fn values(&self, q: Quantity) -> Vec<f64> {
        self.norms.iter().map(|n| q.of(n)).collect()
    }

    /// `t,norm_vx,norm_vy,norm_rho,norm_omega` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm_vx,norm_vy,norm_rho,norm_omega\n");
        for (t, n) in self.times.iter().zip(&self.norms) {
            out.push_str(&format!("{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n", n.vx, n.vy, n.rho, n.omega));
        }
        out
    }
}
