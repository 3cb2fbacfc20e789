//! Gauss–Legendre rules and panel layouts shared by the quadrature code.

use std::sync::OnceLock;

/// Nodes per panel used throughout the crate.
pub const PANEL_NODES: usize = 16;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(PANEL_NODES))
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Breakpoints on [0, 1] graded dyadically toward both endpoints and uniform
/// with spacing `1/interior` in between.
///
/// Integrands with algebraic endpoint behaviour or poles just outside the
/// interval are resolved because every panel sits at least half its width
/// away from the nearest endpoint.
pub fn endpoint_graded_breaks(levels: usize, interior: usize) -> Vec<f64> {
    let h = 1.0 / interior as f64;
    let mut left = Vec::new();
    let mut a = h;
    for _ in 0..levels {
        a *= 0.5;
        left.push(a);
    }
    left.reverse();
    let mut out = vec![0.0];
    out.extend(left.iter().copied());
    for i in 1..interior {
        out.push(i as f64 * h);
    }
    out.extend(left.iter().rev().map(|x| 1.0 - x));
    out.push(1.0);
    out
}

/// Integrates `f` over consecutive panels defined by `breaks` with the
/// standard rule.
pub fn integrate_panels<T, F>(breaks: &[f64], mut f: F) -> T
where
    T: Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let rule = GaussLegendre::standard();
    let mut total = T::default();
    for w in breaks.windows(2) {
        for (x, wt) in rule.on(w[0], w[1]) {
            total += f(x) * wt;
        }
    }
    total
}

/// Integral over [0, 1] of a function that may be singular (integrably) at
/// either endpoint.
///
/// `f` receives both `x` and `1 - x`; the complement is exact near `x = 1`,
/// which matters for integrands written in terms of the distance to the
/// right endpoint.
pub fn integrate_unit<T, F>(mut f: F) -> T
where
    T: Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    F: FnMut(f64, f64) -> T,
{
    let mut total = T::default();
    for &(x, t, w) in unit_rule() {
        total += f(x, t) * w;
    }
    total
}

/// Nodes `(x, 1 - x)` and weights of the rule behind [`integrate_unit`].
pub fn unit_rule() -> &'static [(f64, f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = GaussLegendre::standard();
        let half = half_breaks();
        let mut out = Vec::new();
        for w in half.windows(2) {
            out.extend(rule.on(w[0], w[1]).map(|(x, wt)| (x, 1.0 - x, wt)));
        }
        for w in half.windows(2).rev() {
            out.extend(rule.on(w[0], w[1]).map(|(t, wt)| (1.0 - t, t, wt)).collect::<Vec<_>>().into_iter().rev());
        }
        out
    })
}

/// Breakpoints on [0, 1/2] graded toward 0, used by [`integrate_unit`] on
/// each half of the interval.
pub fn half_breaks() -> &'static [f64] {
    static BREAKS: OnceLock<Vec<f64>> = OnceLock::new();
    BREAKS.get_or_init(|| endpoint_graded_breaks(56, 128).into_iter().filter(|&x| x <= 0.5).collect())
}

/// Composite trapezoid rule on possibly nonuniform nodes.
pub fn trapezoid(nodes: &[f64], values: &[f64]) -> f64 {
    nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
        .sum()
}
