use super::series::{EvolutionSeries, Fit, Quantity};
use crate::error::{Error, Result};

/// Fewest samples accepted by [`fit_decay`].
pub const MIN_FIT_SAMPLES: usize = 8;

/// Window that skips early transients and stops before late-time quadrature
/// error dominates.
pub const DEFAULT_FIT_WINDOW: [f64; 2] = [20.0, 200.0];

/// Least-squares slope of `log(norm)` against `log t` over `window`.
pub fn fit_decay(series: &EvolutionSeries, quantity: Quantity, window: [f64; 2]) -> Result<Fit> {
    let [t1, t2] = window;
    if !(t1 > 0.0 && t2 > t1) {
        return Err(Error::DegenerateFit(format!("window [{t1}, {t2}] must satisfy 0 < t1 < t2")));
    }
    let picked: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.norms)
        .filter(|(t, _)| (t1..=t2).contains(*t))
        .map(|(&t, n)| (t, quantity.of(n)))
        .collect();
    if picked.len() < MIN_FIT_SAMPLES {
        return Err(Error::DegenerateFit(format!(
            "{} samples in [{t1}, {t2}], need {MIN_FIT_SAMPLES}",
            picked.len()
        )));
    }
    if let Some(&(t, v)) = picked.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::DegenerateFit(format!("{} norm is {v} at t = {t}", quantity.name())));
    }
    let n = picked.len() as f64;
    let xs: Vec<f64> = picked.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = picked.iter().map(|p| p.1.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    let log_ratio = picked.iter().map(|&(t, v)| v * t.sqrt() / (1.0 + t.ln())).collect();
    Ok(Fit { quantity, window, slope, intercept, stderr, log_ratio: Some(log_ratio) })
}
