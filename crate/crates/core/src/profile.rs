//! Real initial-data profiles with exact derivatives up to fourth order.
//!
//! Profiles are small expression trees evaluated in truncated Taylor
//! arithmetic, so every derivative the resolvent formulas need comes out
//! exactly rather than from finite differences.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use std::sync::{Arc, OnceLock};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{Branch, BranchedArg, PhysicalParams, ScaledPair};

/// Highest derivative carried.
pub const ORDER: usize = 4;

/// Truncated Taylor series `Σ c_k h^k`, `k ≤ ORDER`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet(pub [f64; ORDER + 1]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        let mut t = [0.0; ORDER + 1];
        t[0] = c;
        Jet(t)
    }

    /// The independent variable at `y`.
    pub fn variable(y: f64) -> Self {
        let mut t = [0.0; ORDER + 1];
        t[0] = y;
        t[1] = 1.0;
        Jet(t)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// Derivatives `f, f', …, f''''`.
    pub fn derivatives(&self) -> [f64; ORDER + 1] {
        let mut d = self.0;
        let mut fact = 1.0;
        for (k, v) in d.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *v *= fact;
        }
        d
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|v| v * s))
    }

    pub fn exp(self) -> Self {
        let f = self.0;
        let mut g = [0.0; ORDER + 1];
        g[0] = f[0].exp();
        for k in 1..=ORDER {
            let s: f64 = (1..=k).map(|j| j as f64 * f[j] * g[k - j]).sum();
            g[k] = s / k as f64;
        }
        Jet(g)
    }

    pub fn recip(self) -> Self {
        let f = self.0;
        let mut g = [0.0; ORDER + 1];
        g[0] = 1.0 / f[0];
        for k in 1..=ORDER {
            let s: f64 = (1..=k).map(|j| f[j] * g[k - j]).sum();
            g[k] = -s * g[0];
        }
        Jet(g)
    }

    /// `(sin f, cos f)`.
    pub fn sin_cos(self) -> (Self, Self) {
        let f = self.0;
        let mut s = [0.0; ORDER + 1];
        let mut c = [0.0; ORDER + 1];
        s[0] = f[0].sin();
        c[0] = f[0].cos();
        for k in 1..=ORDER {
            let ks: f64 = (1..=k).map(|j| j as f64 * f[j] * c[k - j]).sum();
            let kc: f64 = (1..=k).map(|j| j as f64 * f[j] * s[k - j]).sum();
            s[k] = ks / k as f64;
            c[k] = -kc / k as f64;
        }
        (Jet(s), Jet(c))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(o.0) {
            *a += b;
        }
        Jet(r)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut r = [0.0; ORDER + 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate().take(ORDER + 1 - i) {
                r[i + j] += a * b;
            }
        }
        Jet(r)
    }
}

/// A real profile on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    Zero,
    /// `sin(kπy)`.
    Sine { k: u32 },
    /// `exp(-1/(1 - ((y - center)/width)²))` inside the support, zero outside.
    Bump { center: f64, width: f64 },
    /// Smooth step product equal to 1 on `[width, 1 - width]` and vanishing
    /// to infinite order at both endpoints.
    Cutoff { width: f64 },
    /// Chebyshev series in `x = 2y - 1`.
    Chebyshev(Vec<f64>),
    Sum(Vec<(f64, Profile)>),
    Product(Box<Profile>, Box<Profile>),
    /// One field of a discrete eigenmode.
    Mode(ModeShape),
    /// Tabulated jets, see [`Profile::tabulated`].
    Piecewise(Piecewise),
}

/// Which field of an eigenmode a [`ModeShape`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeField {
    Stream,
    Vorticity,
    Density,
}

/// Eigenmode of the linearized operator at a real `c` outside [0, 1]:
/// `ψ = Re(scale·(F(-c)S(y-c) - S(-c)F(y-c)))` built from the regime pair,
/// `ω = -β²ψ/(y-c)²` and `ρ = ψ/(y-c)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeShape {
    pub m: u32,
    pub beta: f64,
    pub c: f64,
    pub field: ModeField,
    pub scale: C64,
    #[serde(skip)]
    pair: Arc<OnceLock<ScaledPair>>,
}

impl PartialEq for ModeShape {
    fn eq(&self, o: &Self) -> bool {
        self.m == o.m && self.beta == o.beta && self.c == o.c && self.field == o.field && self.scale == o.scale
    }
}

impl ModeShape {
    pub fn new(params: PhysicalParams, c: f64, field: ModeField, scale: C64) -> Result<Self> {
        if (0.0..=1.0).contains(&c) || !c.is_finite() {
            return Err(Error::Domain(format!("eigenmode needs c outside [0, 1], got {c}")));
        }
        Ok(Self { m: params.m, beta: params.beta, c, field, scale, pair: Arc::default() })
    }

    pub fn with_field(&self, field: ModeField) -> Self {
        Self { field, ..self.clone() }
    }

    fn pair(&self) -> &ScaledPair {
        self.pair.get_or_init(|| {
            ScaledPair::new(PhysicalParams::new(self.m, self.beta).expect("validated at construction"))
        })
    }

    fn arg(&self, x: f64) -> BranchedArg {
        BranchedArg::with_branch(C64::new(x, 0.0), Branch::Plus)
    }

    /// Unscaled `ψ` and `ψ'`.
    pub fn stream(&self, y: f64) -> Result<(C64, C64)> {
        let pair = self.pair();
        let (f0, s0) = pair.values(self.arg(-self.c))?;
        let e = pair.eval(self.arg(y - self.c))?;
        Ok((
            f0 * e.second.value - s0 * e.first.value,
            f0 * e.second.derivative - s0 * e.first.derivative,
        ))
    }

    fn jet(&self, y: f64) -> Jet {
        let (v, d) = self.stream(y).expect("eigenmode arguments stay inside the series domain");
        let zeta = y - self.c;
        let b2 = self.beta * self.beta;
        let m2 = (self.m as f64).powi(2);
        // Taylor coefficients of ψ from ψ'' = (m² - β²/ζ²)ψ.
        let mut q = [0.0; ORDER + 1];
        for (k, qk) in q.iter_mut().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *qk = -b2 * sign * (k + 1) as f64 * zeta.powi(-(k as i32) - 2);
        }
        q[0] += m2;
        let mut a = [C64::new(0.0, 0.0); ORDER + 1];
        a[0] = v;
        a[1] = d;
        for n in 0..=ORDER - 2 {
            let s: C64 = (0..=n).map(|k| a[n - k] * q[k]).sum();
            a[n + 2] = s / ((n + 2) * (n + 1)) as f64;
        }
        let psi = Jet(a.map(|c| (self.scale * c).re));
        let z = Jet::variable(y) - Jet::constant(self.c);
        match self.field {
            ModeField::Stream => psi,
            ModeField::Density => psi * z.recip(),
            ModeField::Vorticity => {
                let r = z.recip();
                (psi * r * r).scale(-b2)
            }
        }
    }
}

impl Profile {
    /// Built-in named profiles: `sin_pi`, `bump`, `zero`.
    pub fn named(name: &str) -> Option<Profile> {
        match name {
            "sin_pi" => Some(Profile::Sine { k: 1 }),
            "bump" => Some(Profile::Bump { center: 0.5, width: 0.3 }),
            "zero" => Some(Profile::Zero),
            _ => None,
        }
    }

    /// Least-squares Chebyshev fit to samples `(y, value)`.
    pub fn fit_samples(samples: &[(f64, f64)], degree: usize) -> Result<Profile> {
        if samples.len() < degree + 1 {
            return Err(Error::InvalidGrid(format!(
                "{} samples cannot determine degree {degree}",
                samples.len()
            )));
        }
        if samples.iter().any(|(y, v)| !(0.0..=1.0).contains(y) || !v.is_finite()) {
            return Err(Error::InvalidGrid("samples must lie in [0, 1] and be finite".into()));
        }
        let n = degree + 1;
        let a = faer::Mat::<f64>::from_fn(samples.len(), n, |i, k| {
            let x = 2.0 * samples[i].0 - 1.0;
            (k as f64 * x.clamp(-1.0, 1.0).acos()).cos()
        });
        let b = faer::Mat::<f64>::from_fn(samples.len(), 1, |i, _| samples[i].1);
        let qr = a.qr();
        let sol = faer::linalg::solvers::SolveLstsq::solve_lstsq(&qr, &b);
        Ok(Profile::Chebyshev((0..n).map(|k| sol[(k, 0)]).collect()))
    }

    /// Whether the profile contains terms that need special-function
    /// evaluations.
    pub fn is_costly(&self) -> bool {
        match self {
            Profile::Mode(_) => true,
            Profile::Sum(terms) => terms.iter().any(|(_, p)| p.is_costly()),
            Profile::Product(a, b) => a.is_costly() || b.is_costly(),
            _ => false,
        }
    }

    /// Same profile with the costly terms of a sum gathered into one
    /// tabulated term; cheap terms stay exact.
    pub fn with_costly_tabulated(&self) -> Profile {
        match self {
            Profile::Sum(terms) if self.is_costly() => {
                let (costly, mut cheap): (Vec<_>, Vec<_>) = terms.iter().cloned().partition(|(_, p)| p.is_costly());
                cheap.push((1.0, Profile::Sum(costly).tabulated()));
                Profile::Sum(cheap)
            }
            p if p.is_costly() => p.tabulated(),
            p => p.clone(),
        }
    }

    /// Piecewise Chebyshev interpolation of the value and each derivative on
    /// panels graded toward both walls. Meant for profiles analytic on [0, 1].
    pub fn tabulated(&self) -> Profile {
        if let Profile::Piecewise(_) = self {
            return self.clone();
        }
        Profile::Piecewise(Piecewise::new(self))
    }

    pub fn scaled(self, s: f64) -> Profile {
        Profile::Sum(vec![(s, self)])
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Sum(terms) => terms.iter().all(|(c, p)| *c == 0.0 || p.is_zero()),
            Profile::Product(a, b) => a.is_zero() || b.is_zero(),
            Profile::Chebyshev(c) => c.iter().all(|&v| v == 0.0),
            _ => false,
        }
    }

    pub fn jet(&self, y: f64) -> Jet {
        match self {
            Profile::Zero => Jet::default(),
            Profile::Sine { k } => Jet::variable(y).scale(*k as f64 * PI).sin_cos().0,
            Profile::Bump { center, width } => {
                let r = (Jet::variable(y) - Jet::constant(*center)).scale(1.0 / width);
                if r.value().abs() >= 1.0 {
                    return Jet::default();
                }
                (Jet::constant(1.0) - r * r).recip().scale(-1.0).exp()
            }
            Profile::Cutoff { width } => {
                let x = Jet::variable(y);
                smooth_step(x.scale(1.0 / width)) * smooth_step((Jet::constant(1.0) - x).scale(1.0 / width))
            }
            Profile::Chebyshev(c) => {
                let x = Jet::variable(y).scale(2.0) - Jet::constant(1.0);
                let mut t0 = Jet::constant(1.0);
                let mut t1 = x;
                let mut acc = Jet::default();
                for (k, &ck) in c.iter().enumerate() {
                    let tk = if k == 0 { t0 } else { t1 };
                    acc = acc + tk.scale(ck);
                    if k >= 1 {
                        let t2 = (x * t1).scale(2.0) - t0;
                        t0 = t1;
                        t1 = t2;
                    }
                }
                acc
            }
            Profile::Sum(terms) => terms
                .iter()
                .fold(Jet::default(), |acc, (c, p)| acc + p.jet(y).scale(*c)),
            Profile::Product(a, b) => a.jet(y) * b.jet(y),
            Profile::Mode(shape) => shape.jet(y),
            Profile::Piecewise(pw) => pw.jet(y),
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        self.jet(y).value()
    }

    /// `[f, f', f'', f''', f'''']` at `y`.
    pub fn derivatives(&self, y: f64) -> [f64; ORDER + 1] {
        self.jet(y).derivatives()
    }
}

/// Chebyshev–Lobatto interpolants of `f, f', …, f''''` on each panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piecewise {
    breaks: Vec<f64>,
    /// `coeffs[panel][derivative]`.
    coeffs: Vec<Vec<Vec<f64>>>,
}

/// Interpolation degree per panel.
const PIECE_DEGREE: usize = 16;
/// Dyadic levels toward each wall and uniform interior panels.
const PIECE_LEVELS: usize = 40;
const PIECE_INTERIOR: usize = 64;

impl Piecewise {
    pub fn new(p: &Profile) -> Self {
        let breaks = crate::quad::endpoint_graded_breaks(PIECE_LEVELS, PIECE_INTERIOR);
        let n = PIECE_DEGREE;
        let coeffs = breaks
            .windows(2)
            .map(|w| {
                let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                let samples: Vec<[f64; ORDER + 1]> = (0..=n)
                    .map(|j| {
                        let y = if j == 0 {
                            w[1]
                        } else if j == n {
                            w[0]
                        } else {
                            mid + half * (PI * j as f64 / n as f64).cos()
                        };
                        p.derivatives(y)
                    })
                    .collect();
                (0..=ORDER)
                    .map(|d| {
                        (0..=n)
                            .map(|k| {
                                let s: f64 = (0..=n)
                                    .map(|j| {
                                        let edge = if j == 0 || j == n { 0.5 } else { 1.0 };
                                        edge * samples[j][d] * (PI * (j * k) as f64 / n as f64).cos()
                                    })
                                    .sum();
                                let edge = if k == 0 || k == n { 0.5 } else { 1.0 };
                                2.0 * edge * s / n as f64
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { breaks, coeffs }
    }

    fn jet(&self, y: f64) -> Jet {
        let b = &self.breaks;
        let i = b.partition_point(|&x| x <= y).clamp(1, b.len() - 1) - 1;
        let x = ((2.0 * y - b[i] - b[i + 1]) / (b[i + 1] - b[i])).clamp(-1.0, 1.0);
        let mut t = [0.0; ORDER + 1];
        let mut fact = 1.0;
        for (d, c) in self.coeffs[i].iter().enumerate() {
            if d > 0 {
                fact *= d as f64;
            }
            t[d] = clenshaw(c, x) / fact;
        }
        Jet(t)
    }
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

/// `0` for `s ≤ 0`, `1` for `s ≥ 1`, C^∞ in between.
fn smooth_step(s: Jet) -> Jet {
    let v = s.value();
    if v <= 0.0 {
        return Jet::default();
    }
    if v >= 1.0 {
        return Jet::constant(1.0);
    }
    let a = s.recip().scale(-1.0).exp();
    let b = (Jet::constant(1.0) - s).recip().scale(-1.0).exp();
    a * (a + b).recip()
}
