//! Shared helpers for integration tests.

use ebc_core::quad::integrate_panels;
use ebc_core::tg::TaylorGoldstein;
use ebc_core::{Complex64 as C64, PhysicalParams, Regime, SpectralPoint};

/// `m^{1+μ}|ζ|^{-1/2+μ}‖G(y, y₀, ·)‖` over `m|y - y₀| ≤ 3β`, divided by the
/// log factor in the critical regime.
pub fn normalized_kernel(p: PhysicalParams, y0: f64, eps: f64) -> f64 {
    let tg = TaylorGoldstein::new(p);
    let hom = tg.at(SpectralPoint::plus(y0, eps)).unwrap();
    let m = p.mf();
    let reach = 3.0 * p.beta / m;
    let mut best: f64 = 0.0;
    for i in 0..=40 {
        let y = y0 - reach + 2.0 * reach * i as f64 / 40.0;
        if !(0.0..=1.0).contains(&y) {
            continue;
        }
        let mut breaks: Vec<f64> = (0..=64).map(|k| k as f64 / 64.0).collect();
        breaks.extend([y, y0]);
        let mut s = eps.max(1e-6);
        while s < 1.0 {
            breaks.extend([y0 - s, y0 + s]);
            s *= 2.0;
        }
        breaks.retain(|x| (0.0..=1.0).contains(x));
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let norm2: f64 = integrate_panels(&breaks, |z| hom.greens(y, z).unwrap().g.norm_sqr());
        let zeta = C64::new(y - y0, eps).norm();
        let mut q = m.powf(1.0 + p.mu) * zeta.powf(-0.5 + p.mu) * norm2.sqrt();
        if p.regime == Regime::Quarter {
            q /= 1.0 + (m * zeta).ln().abs();
        }
        best = best.max(q);
    }
    best
}
