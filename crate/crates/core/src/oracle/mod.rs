//! Finite-difference ground truth: Poisson solve, matrix form of the
//! linearized operator, dense eigensolve and RK4 time stepping.
//!
//! Vorticity and density live on the interior nodes; the stream function
//! vanishes at the walls.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::data::InitialDataMode;
use crate::error::{Error, Result};
use crate::evolution::{EvolutionSeries, Norms, Snapshot};
use crate::grid::{uniform_nodes, validate_nodes, GridFunction, GridKind};
use crate::specfun::PhysicalParams;

/// Largest grid accepted by the dense eigensolver.
pub const MAX_DENSE: usize = 2048;
/// Smallest grid accepted by [`discretize_operator`].
pub const MIN_GRID: usize = 64;

/// Node layout of the finite-difference grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleGrid {
    #[default]
    Uniform,
    /// `y_i = (1 - cos(πi/n))/2`, clustered at both walls.
    Graded,
}

impl OracleGrid {
    /// `n + 1` nodes including both walls.
    pub fn nodes(self, n: usize) -> Vec<f64> {
        match self {
            OracleGrid::Uniform => uniform_nodes(n),
            OracleGrid::Graded => (0..=n)
                .map(|i| {
                    let s = i as f64 / n as f64;
                    // Symmetric form keeps both walls equally resolved.
                    if 2 * i <= n {
                        (0.5 * std::f64::consts::PI * s).sin().powi(2)
                    } else {
                        1.0 - (0.5 * std::f64::consts::PI * (1.0 - s)).sin().powi(2)
                    }
                })
                .collect(),
        }
    }

    pub fn kind(self) -> GridKind {
        match self {
            OracleGrid::Uniform => GridKind::Uniform,
            OracleGrid::Graded => GridKind::Graded,
        }
    }
}

/// Three-point `∂_y² - m²` on the interior nodes with Dirichlet walls.
#[derive(Debug, Clone)]
pub struct Laplacian {
    nodes: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    /// Trapezoid weights of the interior nodes; `weight·Δ` is symmetric.
    weights: Vec<f64>,
}

impl Laplacian {
    pub fn new(params: &PhysicalParams, nodes: &[f64]) -> Result<Self> {
        validate_nodes(nodes)?;
        if nodes.len() < 3 {
            return Err(Error::InvalidGrid("need an interior node".into()));
        }
        let m2 = params.mf() * params.mf();
        let k = nodes.len() - 2;
        let (mut lower, mut diag, mut upper, mut weights) =
            (Vec::with_capacity(k), Vec::with_capacity(k), Vec::with_capacity(k), Vec::with_capacity(k));
        for i in 1..=k {
            let hl = nodes[i] - nodes[i - 1];
            let hr = nodes[i + 1] - nodes[i];
            lower.push(2.0 / (hl * (hl + hr)));
            diag.push(-2.0 / (hl * hr) - m2);
            upper.push(2.0 / (hr * (hl + hr)));
            weights.push(0.5 * (hl + hr));
        }
        Ok(Self { nodes: nodes.to_vec(), lower, diag, upper, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let k = v.len();
        (0..k)
            .map(|i| {
                let mut s = v[i] * self.diag[i];
                if i > 0 {
                    s = s + v[i - 1] * self.lower[i];
                }
                if i + 1 < k {
                    s = s + v[i + 1] * self.upper[i];
                }
                s
            })
            .collect()
    }

    /// Thomas algorithm for `Δψ = f` on the interior nodes.
    pub fn solve<T>(&self, f: &[T]) -> Vec<T>
    where
        T: Copy
            + std::ops::Mul<f64, Output = T>
            + std::ops::Sub<Output = T>
            + std::ops::Div<f64, Output = T>,
    {
        let k = f.len();
        assert_eq!(k, self.diag.len(), "right-hand side must live on the interior nodes");
        let mut c = vec![0.0; k];
        let mut d: Vec<T> = Vec::with_capacity(k);
        let mut denom = self.diag[0];
        c[0] = self.upper[0] / denom;
        d.push(f[0] / denom);
        for i in 1..k {
            denom = self.diag[i] - self.lower[i] * c[i - 1];
            c[i] = self.upper[i] / denom;
            d.push((f[i] - d[i - 1] * self.lower[i]) / denom);
        }
        for i in (0..k - 1).rev() {
            d[i] = d[i] - d[i + 1] * c[i];
        }
        d
    }

    /// Dense `Δ⁻¹`.
    pub fn inverse(&self) -> Mat<f64> {
        let k = self.diag.len();
        let mut inv = Mat::<f64>::zeros(k, k);
        let mut e = vec![0.0; k];
        for j in 0..k {
            e[j] = 1.0;
            let col = self.solve(&e);
            e[j] = 0.0;
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// `ψ` with `(∂_y² - m²)ψ = ω`, `ψ(0) = ψ(1) = 0` on the nodes of `omega`.
pub fn poisson_solve(params: PhysicalParams, omega: &GridFunction) -> Result<GridFunction> {
    let lap = Laplacian::new(&params, &omega.nodes)?;
    let k = omega.len() - 2;
    let inner = lap.solve(&omega.values[1..=k]);
    let mut values = Vec::with_capacity(k + 2);
    values.push(C64::new(0.0, 0.0));
    values.extend(inner);
    values.push(C64::new(0.0, 0.0));
    GridFunction::new(omega.nodes.clone(), values, omega.kind)
}

/// How [`discretize_operator_with`] builds the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OperatorOptions {
    pub grid: OracleGrid,
    /// Replace the shear `y` by 0 (test hook).
    pub frozen_shear: bool,
}

/// Matrix of `L_m(ω, ρ) = (yω + β²ρ, yρ - Δ_m⁻¹ω)` acting on the stacked
/// interior values `[ω; ρ]`.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub params: PhysicalParams,
    pub n: usize,
    pub options: OperatorOptions,
    pub laplacian: Laplacian,
    pub matrix: Mat<f64>,
}

/// Uniform-grid operator with `n` intervals.
pub fn discretize_operator(params: PhysicalParams, n: usize) -> Result<DiscreteOperator> {
    discretize_operator_with(params, n, OperatorOptions::default())
}

pub fn discretize_operator_with(params: PhysicalParams, n: usize, options: OperatorOptions) -> Result<DiscreteOperator> {
    if n < MIN_GRID {
        return Err(Error::InvalidGrid(format!("the operator needs n >= {MIN_GRID}, got {n}")));
    }
    let laplacian = Laplacian::new(&params, &options.grid.nodes(n))?;
    let k = n - 1;
    let inv = laplacian.inverse();
    let b2 = params.beta2();
    let y: Vec<f64> = laplacian.interior().iter().map(|&y| if options.frozen_shear { 0.0 } else { y }).collect();
    let matrix = Mat::<f64>::from_fn(2 * k, 2 * k, |i, j| match (i < k, j < k) {
        (true, true) => if i == j { y[i] } else { 0.0 },
        (true, false) => if j - k == i { b2 } else { 0.0 },
        (false, true) => -inv[(i - k, j)],
        (false, false) => if i == j { y[i - k] } else { 0.0 },
    });
    Ok(DiscreteOperator { params, n, options, laplacian, matrix })
}

/// One eigenpair of the discrete operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEig {
    pub c: C64,
    /// Stacked `[ω; ρ]` on the interior nodes, unit Euclidean norm.
    pub vec: Option<Vec<C64>>,
}

/// Distance of `c` from the interval [0, 1].
pub fn distance_to_unit(c: C64) -> f64 {
    let dx = if c.re < 0.0 { -c.re } else if c.re > 1.0 { c.re - 1.0 } else { 0.0 };
    dx.hypot(c.im)
}

/// Radius, relative to the spectral scale, of the eigenvalue cluster
/// treated as one eigenvalue by [`DiscreteOperator::rank_test`].
pub const NEIGHBORHOOD: f64 = 1e-6;

/// Default rank threshold for [`DiscreteOperator::rank_test`], above the
/// neighborhood radius so a diagonalizable cluster has rank zero.
pub const RANK_TOL: f64 = 1e-5;

/// Semi-simplicity test on the generalized eigenspace of the eigenvalues
/// clustered around `c`: ranks of `K - c` and `(K - c)²` where `K` is the
/// operator restricted to that space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTest {
    pub c: f64,
    /// Eigenvalues within the neighborhood (algebraic multiplicity).
    pub multiplicity: usize,
    pub rank1: usize,
    pub rank2: usize,
    /// Singular values of `K - c` and `(K - c)²`, relative to the spectral
    /// scale and its square.
    pub sigma1: Vec<f64>,
    pub sigma2: Vec<f64>,
}

impl RankTest {
    pub fn semisimple(&self) -> bool {
        self.multiplicity > 0 && self.rank1 == self.rank2
    }

    pub fn geometric_multiplicity(&self) -> usize {
        self.multiplicity - self.rank1
    }
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn interior(&self) -> &[f64] {
        self.laplacian.interior()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let x = Mat::<C64>::from_fn(v.len(), 1, |i, _| v[i]);
        let a = Mat::<C64>::from_fn(self.dim(), self.dim(), |i, j| C64::new(self.matrix[(i, j)], 0.0));
        let y = a * x;
        (0..v.len()).map(|i| y[(i, 0)]).collect()
    }

    /// Stacked interior samples of two profiles.
    pub fn state(&self, data: &InitialDataMode) -> Vec<f64> {
        let y = self.interior();
        y.iter().map(|&y| data.omega.value(y)).chain(y.iter().map(|&y| data.rho.value(y))).collect()
    }

    /// `‖(A - c)v‖ / ‖v‖` in the Euclidean norm.
    pub fn residual(&self, c: C64, v: &[C64]) -> f64 {
        let av = self.apply(v);
        let num: f64 = av.iter().zip(v).map(|(a, x)| (a - c * x).norm_sqr()).sum();
        let den: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        (num / den).sqrt()
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        let mut ev = self
            .matrix
            .eigenvalues()
            .map_err(|e| Error::Convergence(format!("dense eigensolve failed: {e:?}")))?;
        sort_by_distance(&mut ev, |c| *c);
        Ok(ev)
    }

    pub fn eigen(&self) -> Result<Vec<OracleEig>> {
        let evd = self
            .matrix
            .eigen()
            .map_err(|e| Error::Convergence(format!("dense eigensolve failed: {e:?}")))?;
        let (u, s) = (evd.U(), evd.S());
        let dim = self.dim();
        let mut out: Vec<OracleEig> = (0..dim)
            .map(|j| {
                let v: Vec<C64> = (0..dim).map(|i| u[(i, j)]).collect();
                let nrm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                OracleEig { c: s.column_vector()[j], vec: Some(v.into_iter().map(|x| x / nrm).collect()) }
            })
            .collect();
        sort_by_distance(&mut out, |e| e.c);
        Ok(out)
    }

    /// Right (`adjoint = false`) or left eigenvector at a real eigenvalue,
    /// by inverse iteration.
    pub fn eigenvector(&self, c: f64, adjoint: bool) -> Result<Vec<f64>> {
        let dim = self.dim();
        let shift = c + 1e-12 * (1.0 + c.abs());
        let a = Mat::<f64>::from_fn(dim, dim, |i, j| {
            let v = if adjoint { self.matrix[(j, i)] } else { self.matrix[(i, j)] };
            if i == j { v - shift } else { v }
        });
        let lu = a.partial_piv_lu();
        let mut x = Mat::<f64>::from_fn(dim, 1, |i, _| 1.0 + 0.1 * (i as f64 * 0.37).sin());
        for _ in 0..3 {
            x = lu.solve(&x);
            let nrm = (0..dim).map(|i| x[(i, 0)].powi(2)).sum::<f64>().sqrt();
            if !nrm.is_finite() || nrm == 0.0 {
                return Err(Error::Convergence("inverse iteration broke down".into()));
            }
            x *= faer::Scale(1.0 / nrm);
        }
        Ok((0..dim).map(|i| x[(i, 0)]).collect())
    }

    /// Rank test around the eigenvalue `c`. Singular values of `K - c` count
    /// toward the rank when above `tol` times the spectral scale, those of
    /// `(K - c)²` when above `tol²` times its square.
    pub fn rank_test(&self, c: f64, tol: f64) -> Result<RankTest> {
        let dim = self.dim();
        let eigs = self.eigenvalues()?;
        let scale = eigs.iter().map(|e| e.norm()).fold(1.0, f64::max);
        let k = eigs.iter().filter(|e| (*e - C64::new(c, 0.0)).norm() <= NEIGHBORHOOD * scale).count();
        if k == 0 {
            return Err(Error::InvalidParams(format!("no eigenvalue within {:e} of {c}", NEIGHBORHOOD * scale)));
        }
        let b = Mat::<f64>::from_fn(dim, dim, |i, j| self.matrix[(i, j)] - if i == j { c } else { 0.0 });
        let mut bk = b.clone();
        for _ in 1..k {
            bk = &bk * &b;
        }
        let svd = bk.svd().map_err(|e| Error::Convergence(format!("singular value decomposition failed: {e:?}")))?;
        let v = svd.V();
        let q = Mat::<f64>::from_fn(dim, k, |i, j| v[(i, dim - k + j)]);
        let restricted = q.transpose() * &b * &q;
        let singular = |m: &Mat<f64>| {
            m.singular_values().map_err(|e| Error::Convergence(format!("singular values failed: {e:?}")))
        };
        let s1: Vec<f64> = singular(&restricted)?.iter().map(|x| x / scale).collect();
        let s2: Vec<f64> = singular(&(&restricted * &restricted))?.iter().map(|x| x / (scale * scale)).collect();
        let rank = |s: &[f64], t: f64| s.iter().filter(|&&x| x > t).count();
        let (rank1, rank2) = (rank(&s1, tol), rank(&s2, tol * tol));
        Ok(RankTest { c, multiplicity: k, rank1, rank2, sigma1: s1, sigma2: s2 })
    }
}

fn sort_by_distance<T>(v: &mut [T], key: impl Fn(&T) -> C64) {
    v.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        distance_to_unit(kb)
            .partial_cmp(&distance_to_unit(ka))
            .unwrap()
            .then(ka.re.partial_cmp(&kb.re).unwrap())
            .then(ka.im.partial_cmp(&kb.im).unwrap())
    });
}

/// Eigenvalues of the uniform-grid operator, farthest from [0, 1] first.
pub fn oracle_eigs(params: PhysicalParams, n: usize) -> Result<Vec<OracleEig>> {
    oracle_eigs_with(params, n, OperatorOptions::default(), false)
}

pub fn oracle_eigs_with(
    params: PhysicalParams,
    n: usize,
    options: OperatorOptions,
    vectors: bool,
) -> Result<Vec<OracleEig>> {
    if n > MAX_DENSE {
        return Err(Error::InvalidGrid(format!("dense eigensolve is capped at n = {MAX_DENSE}")));
    }
    let op = discretize_operator_with(params, n, options)?;
    if vectors {
        op.eigen()
    } else {
        Ok(op.eigenvalues()?.into_iter().map(|c| OracleEig { c, vec: None }).collect())
    }
}

/// Options for [`time_step_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    /// Grid intervals.
    pub n: usize,
    pub grid: OracleGrid,
    /// Defaults to [`default_dt`].
    pub dt: Option<f64>,
    pub snapshots: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { n: 512, grid: OracleGrid::Uniform, dt: None, snapshots: false }
    }
}

/// `min(0.5/(m n), 1e-2)`.
pub fn default_dt(m: u32, n: usize) -> f64 {
    (0.5 / (m as f64 * n as f64)).min(1e-2)
}

/// Growth factor of the state norm treated as blow-up.
pub const BLOW_UP: f64 = 22026.465794806718;

/// RK4 evolution of `∂_t(ω, ρ) = -im L_m(ω, ρ)`, sampled at `samples`
/// equispaced times in `(0, t_end]` plus `t = 0`.
pub fn time_step(
    params: PhysicalParams,
    data: &InitialDataMode,
    t_end: f64,
    dt: f64,
    samples: usize,
) -> Result<EvolutionSeries> {
    if !(t_end > 0.0) || samples == 0 {
        return Err(Error::InvalidParams("need t_end > 0 and at least one sample".into()));
    }
    let times: Vec<f64> = (0..=samples).map(|i| t_end * i as f64 / samples as f64).collect();
    time_step_with(params, data, &times, &StepOptions { dt: Some(dt), ..Default::default() })
}

/// RK4 evolution reporting norms (and optionally snapshots) at `times`.
pub fn time_step_with(
    params: PhysicalParams,
    data: &InitialDataMode,
    times: &[f64],
    opts: &StepOptions,
) -> Result<EvolutionSeries> {
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("times must be nonnegative and strictly increasing".into()));
    }
    let dt_max = opts.dt.unwrap_or_else(|| default_dt(params.m, opts.n));
    if !(dt_max > 0.0) {
        return Err(Error::InvalidParams(format!("time step must be positive, got {dt_max}")));
    }
    let nodes = opts.grid.nodes(opts.n);
    let lap = Laplacian::new(&params, &nodes)?;
    let y = lap.interior().to_vec();
    let k = y.len();
    let b2 = params.beta2();
    let im = C64::new(0.0, params.mf());
    let mut w: Vec<C64> = y.iter().map(|&y| C64::new(data.omega.value(y), 0.0)).collect();
    let mut r: Vec<C64> = y.iter().map(|&y| C64::new(data.rho.value(y), 0.0)).collect();

    let rhs = |w: &[C64], r: &[C64]| -> (Vec<C64>, Vec<C64>) {
        let psi = lap.solve(w);
        let dw = (0..k).map(|i| -im * (y[i] * w[i] + b2 * r[i])).collect();
        let dr = (0..k).map(|i| -im * (y[i] * r[i] - psi[i])).collect();
        (dw, dr)
    };
    let axpy = |a: &[C64], s: f64, b: &[C64]| -> Vec<C64> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };

    let state_norm = |w: &[C64], r: &[C64]| -> f64 {
        w.iter().chain(r).zip(lap.weights().iter().chain(lap.weights())).map(|(v, wt)| wt * v.norm_sqr()).sum::<f64>().sqrt()
    };
    let n0 = state_norm(&w, &r);

    let mut t = 0.0;
    let mut norms = Vec::with_capacity(times.len());
    let mut snaps = Vec::new();
    for &target in times {
        let span = target - t;
        let steps = (span / dt_max).ceil() as usize;
        if steps > 0 {
            let dt = span / steps as f64;
            for _ in 0..steps {
                let (k1w, k1r) = rhs(&w, &r);
                let (k2w, k2r) = rhs(&axpy(&w, 0.5 * dt, &k1w), &axpy(&r, 0.5 * dt, &k1r));
                let (k3w, k3r) = rhs(&axpy(&w, 0.5 * dt, &k2w), &axpy(&r, 0.5 * dt, &k2r));
                let (k4w, k4r) = rhs(&axpy(&w, dt, &k3w), &axpy(&r, dt, &k3r));
                for i in 0..k {
                    w[i] += (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i]) * (dt / 6.0);
                    r[i] += (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]) * (dt / 6.0);
                }
            }
            t = target;
            let nt = state_norm(&w, &r);
            if !(nt <= BLOW_UP * n0.max(f64::MIN_POSITIVE)) {
                return Err(Error::Stability { t });
            }
        }
        let full = |v: &[C64]| {
            let mut out = Vec::with_capacity(k + 2);
            out.push(C64::new(0.0, 0.0));
            out.extend_from_slice(v);
            out.push(C64::new(0.0, 0.0));
            GridFunction::new(nodes.clone(), out, opts.grid.kind())
        };
        let psi = full(&lap.solve(&w))?;
        let rho = full(&r)?;
        let omega = full(&w)?;
        norms.push(Norms {
            vx: psi.derivative().norm_l2(),
            vy: params.mf() * psi.norm_l2(),
            rho: rho.norm_l2(),
            omega: omega.norm_l2(),
        });
        if opts.snapshots {
            snaps.push(Snapshot { t: target, psi, rho });
        }
    }
    let mut series = EvolutionSeries::new(times.to_vec(), norms)?;
    if opts.snapshots {
        series.snapshots = Some(snaps);
    }
    Ok(series)
}
