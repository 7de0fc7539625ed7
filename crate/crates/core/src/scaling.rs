//! Power-law exponent of the spread, `<sigma(t)> ~ t^alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quench::SpreadSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub alpha: f64,
    pub log_prefactor: f64,
    /// RMS residual of the log-log line.
    pub fit_error: f64,
    /// Standard error of `alpha` propagated from the per-row standard errors.
    pub alpha_std_error: f64,
}

impl ScalingResult {
    pub fn predict(&self, t: f64) -> f64 {
        self.log_prefactor.exp() * t.powf(self.alpha)
    }
}

/// Ordinary least squares of `ln mean_sigma` against `ln t`.
pub fn fit_alpha(series: &SpreadSeries) -> Result<ScalingResult> {
    let rows = &series.rows;
    if rows.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "need at least 3 step counts, got {}",
            rows.len()
        )));
    }
    if let Some(bad) = rows
        .iter()
        .find(|r| !(r.mean_sigma > 0.0) || !r.mean_sigma.is_finite())
    {
        return Err(Error::Domain(format!(
            "mean_sigma must be positive, got {} at t = {}",
            bad.mean_sigma, bad.t
        )));
    }
    if rows.iter().any(|r| r.t == 0) {
        return Err(Error::Domain("step counts must be positive".into()));
    }

    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| (r.t as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_sigma.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Underdetermined("all step counts are equal".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let alpha = sxy / sxx;
    let log_prefactor = y_mean - alpha * x_mean;

    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - log_prefactor - alpha * x).powi(2))
        .sum();
    // d(ln s) = ds / s, and the slope is linear in the y values.
    let var_alpha: f64 = xs
        .iter()
        .zip(rows)
        .map(|(x, r)| ((x - x_mean) / sxx * r.std_error / r.mean_sigma).powi(2))
        .sum();

    Ok(ScalingResult {
        alpha,
        log_prefactor,
        fit_error: (sse / n).sqrt(),
        alpha_std_error: var_alpha.sqrt(),
    })
}
