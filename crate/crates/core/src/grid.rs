//! Sampled functions on [0, 1].

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::trapezoid;

/// How the nodes of a [`GridFunction`] were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    Uniform,
    GaussPanels,
    Graded,
}

/// `n + 1` equispaced nodes on [0, 1].
pub fn uniform_nodes(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// Complex samples on an ordered node set covering [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<C64>,
    pub kind: GridKind,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<C64>, kind: GridKind) -> Result<Self> {
        validate_nodes(&nodes)?;
        if nodes.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite value".into()));
        }
        Ok(Self { nodes, values, kind })
    }

    pub fn from_fn(nodes: Vec<f64>, kind: GridKind, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = nodes.iter().map(|&y| f(y)).collect();
        Self::new(nodes, values, kind)
    }

    pub fn zeros(nodes: Vec<f64>, kind: GridKind) -> Self {
        let n = nodes.len();
        Self { nodes, values: vec![C64::new(0.0, 0.0); n], kind }
    }

    pub fn uniform(n: usize, f: impl Fn(f64) -> C64) -> Self {
        Self::from_fn(uniform_nodes(n), GridKind::Uniform, f).expect("uniform grid is valid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// L² norm by the trapezoid rule.
    pub fn norm_l2(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        trapezoid(&self.nodes, &sq).max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Self {
        let values = self.nodes.iter().zip(&self.values).map(|(&y, &v)| f(y, v)).collect();
        Self { nodes: self.nodes.clone(), values, kind: self.kind }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|_, v| v * s)
    }

    /// Pointwise `self - other`; both must share nodes.
    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &GridFunction, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.nodes != other.nodes {
            return Err(Error::InvalidGrid("grid functions live on different nodes".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { nodes: self.nodes.clone(), values, kind: self.kind })
    }

    pub fn conj(&self) -> Self {
        self.map(|_, v| v.conj())
    }

    /// Second-order finite-difference derivative (three-point stencils,
    /// one-sided at the ends).
    pub fn derivative(&self) -> Self {
        let x = &self.nodes;
        let f = &self.values;
        let n = x.len();
        let mut d = vec![C64::new(0.0, 0.0); n];
        if n < 3 {
            if n == 2 {
                let s = (f[1] - f[0]) / (x[1] - x[0]);
                d = vec![s, s];
            }
            return Self { nodes: x.clone(), values: d, kind: self.kind };
        }
        for i in 1..n - 1 {
            let hl = x[i] - x[i - 1];
            let hr = x[i + 1] - x[i];
            d[i] = f[i - 1] * (-hr / (hl * (hl + hr)))
                + f[i] * ((hr - hl) / (hl * hr))
                + f[i + 1] * (hl / (hr * (hl + hr)));
        }
        let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
        d[0] = f[0] * (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) + f[1] * ((h1 + h2) / (h1 * h2))
            - f[2] * (h1 / (h2 * (h1 + h2)));
        let (h1, h2) = (x[n - 1] - x[n - 2], x[n - 2] - x[n - 3]);
        d[n - 1] = f[n - 1] * ((2.0 * h1 + h2) / (h1 * (h1 + h2)))
            - f[n - 2] * ((h1 + h2) / (h1 * h2))
            + f[n - 3] * (h1 / (h2 * (h1 + h2)));
        Self { nodes: x.clone(), values: d, kind: self.kind }
    }
}

/// Checks that nodes are strictly increasing from 0 to 1.
pub fn validate_nodes(nodes: &[f64]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::InvalidGrid("need at least two nodes".into()));
    }
    if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
        return Err(Error::InvalidGrid("nodes must start at 0 and end at 1".into()));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
    }
    Ok(())
}
