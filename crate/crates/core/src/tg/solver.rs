use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use super::homogeneous::HomogeneousSolutions;
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::specfun::ComplexEval;

/// Quadrature of the Green's kernel against sources sampled on fixed nodes.
///
/// Panels break at every output point (where the kernel has a kink), at the
/// walls, and geometrically toward the critical layer `y₀` on the scale
/// `max(ε, dist(y₀, [0, 1]))`, so each panel sits at least its own width
/// away from the singularity of the homogeneous solutions.
#[derive(Debug, Clone)]
pub struct GreenSolver<'a> {
    hom: HomogeneousSolutions<'a>,
    outputs: Vec<f64>,
    out_vals: Vec<(ComplexEval, ComplexEval)>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    node_vals: Vec<(C64, C64)>,
    /// Number of quadrature nodes below each output.
    below: Vec<usize>,
    /// Requested outputs occupy `offset..offset + len` of the internal list,
    /// which always contains both walls.
    offset: usize,
    len: usize,
}

impl<'a> GreenSolver<'a> {
    /// `outputs` must be increasing and inside [0, 1].
    pub fn new(hom: HomogeneousSolutions<'a>, outputs: &[f64]) -> Result<Self> {
        if outputs.iter().any(|y| !(0.0..=1.0).contains(y)) || outputs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("outputs must be increasing points of [0, 1]".into()));
        }
        let len = outputs.len();
        let mut all = Vec::with_capacity(len + 2);
        let offset = if outputs.first() == Some(&0.0) { 0 } else { 1 };
        if offset == 1 {
            all.push(0.0);
        }
        all.extend_from_slice(outputs);
        if outputs.last() != Some(&1.0) {
            all.push(1.0);
        }
        let outputs = &all[..];
        let sp = hom.spectral_point();
        let breaks = panel_breaks(outputs, sp.y0, sp.eps);
        let rule = GaussLegendre::standard();
        let (short, shortest) = (short_rule(8), short_rule(4));
        let mut nodes = Vec::with_capacity(breaks.len() * rule.nodes.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            // Distance from the panel to the singular point `y₀ ∓ iε`.
            let mid = 0.5 * (w[0] + w[1]);
            let half = 0.5 * (w[1] - w[0]);
            let dist = ((mid - sp.y0).abs() - half).max(0.0).hypot(sp.eps);
            // Sources may vary on tiny scales at the walls (eigenmode
            // components); a wall-graded panel is at least its width away
            // from any singularity outside [0, 1].
            let wall = w[0].min(1.0 - w[1]) < 2.0 * (w[1] - w[0]);
            let r = if wall && dist >= w[1] - w[0] {
                short
            } else if dist >= 4.0 * SHORT_RATIO * (w[1] - w[0]) {
                shortest
            } else if dist >= SHORT_RATIO * (w[1] - w[0]) {
                short
            } else {
                rule
            };
            for (x, wt) in r.on(w[0], w[1]) {
                nodes.push(x);
                weights.push(wt);
            }
        }
        let node_vals = nodes.iter().map(|&z| hom.values(z)).collect::<Result<Vec<_>>>()?;
        let out_vals = outputs.iter().map(|&y| hom.at(y)).collect::<Result<Vec<_>>>()?;
        let below = outputs.iter().map(|&y| nodes.partition_point(|&z| z < y)).collect();
        Ok(Self { hom, outputs: all, out_vals, nodes, weights, node_vals, below, offset, len })
    }

    pub fn homogeneous(&self) -> &HomogeneousSolutions<'a> {
        &self.hom
    }

    /// Quadrature nodes at which sources must be sampled.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs[self.offset..self.offset + self.len]
    }

    /// `(φ_u, φ_l)` with derivatives at the outputs.
    pub fn output_solutions(&self) -> &[(ComplexEval, ComplexEval)] {
        &self.out_vals[self.offset..self.offset + self.len]
    }

    /// `Φ` and `Φ'` at the outputs for `TG Φ = f`, `Φ(0) = Φ(1) = 0`.
    pub fn solve(&self, f: &[C64]) -> Vec<(C64, C64)> {
        self.solve_with(f, C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    /// `Φ` and `Φ'` at the outputs for `TG Φ = f`, `Φ(0) = a`, `Φ(1) = b`.
    pub fn solve_with(&self, f: &[C64], a: C64, b: C64) -> Vec<(C64, C64)> {
        self.solve_walls(f, a, b).0
    }

    /// As [`GreenSolver::solve_with`], also returning `(Φ'(0), Φ'(1))`.
    pub fn solve_walls(&self, f: &[C64], a: C64, b: C64) -> (Vec<(C64, C64)>, (C64, C64)) {
        assert_eq!(f.len(), self.nodes.len(), "source must be sampled on the solver nodes");
        let n = self.nodes.len();
        // Prefix sums of φ_l f and φ_u f.
        let mut pl = vec![C64::new(0.0, 0.0); n + 1];
        let mut pu = vec![C64::new(0.0, 0.0); n + 1];
        for i in 0..n {
            let wf = f[i] * self.weights[i];
            pl[i + 1] = pl[i] + self.node_vals[i].1 * wf;
            pu[i + 1] = pu[i] + self.node_vals[i].0 * wf;
        }
        let w = self.hom.wronskian();
        let (ua, lb) = if a != C64::new(0.0, 0.0) || b != C64::new(0.0, 0.0) {
            let (u0, _) = self.hom.values(0.0).expect("wall values were evaluated already");
            let (_, l1) = self.hom.values(1.0).expect("wall values were evaluated already");
            (a / u0, b / l1)
        } else {
            (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        };
        let all: Vec<(C64, C64)> = self
            .below
            .iter()
            .zip(&self.out_vals)
            .map(|(&k, (u, l))| {
                let il = pl[k];
                let iu = pu[n] - pu[k];
                let v = -(u.value * il + l.value * iu) / w + ua * u.value + lb * l.value;
                let d = -(u.derivative * il + l.derivative * iu) / w + ua * u.derivative + lb * l.derivative;
                (v, d)
            })
            .collect();
        let walls = (all[0].1, all[all.len() - 1].1);
        (all[self.offset..self.offset + self.len].to_vec(), walls)
    }
}

/// Panels at least this many widths away from the singularity use 8 nodes,
/// and 4 nodes beyond four times that; the rule error stays near 1e-15.
const SHORT_RATIO: f64 = 4.0;

fn short_rule(n: usize) -> &'static GaussLegendre {
    static RULES: OnceLock<[GaussLegendre; 2]> = OnceLock::new();
    let r = RULES.get_or_init(|| [GaussLegendre::new(4), GaussLegendre::new(8)]);
    if n == 4 { &r[0] } else { &r[1] }
}

/// Dyadic grading toward both walls, down to about 1e-12.
const WALL_LEVELS: i32 = 40;

/// Breakpoints for the kernel quadrature.
pub(crate) fn panel_breaks(outputs: &[f64], y0: f64, eps: f64) -> Vec<f64> {
    let mut b = vec![0.0, 1.0];
    b.extend_from_slice(outputs);
    let dist = if y0 < 0.0 { -y0 } else if y0 > 1.0 { y0 - 1.0 } else { 0.0 };
    let s = eps.max(dist).max(1e-14);
    if (0.0..=1.0).contains(&y0) {
        b.push(y0);
    }
    for k in 1..=WALL_LEVELS {
        let h = 0.5f64.powi(k);
        b.extend([h, 1.0 - h]);
    }
    let mut h = s;
    while h < 2.0 {
        for p in [y0 - h, y0 + h] {
            if p > 0.0 && p < 1.0 {
                b.push(p);
            }
        }
        h *= 2.0;
    }
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    b
}
