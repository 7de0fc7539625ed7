//! Fits of the exponent's response to disorder strength.
//!
//! Two three-parameter models are supported: a Gaussian decay
//! `a exp(-b s^2) + c` and a parabola `a s^2 + b s + c`. Both use unit
//! weights; the per-point `alpha_err` is carried for reporting only.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of fitted parameters.
const M: usize = 3;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.96;

const MAX_ITERATIONS: usize = 500;
const STEP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub sigma: f64,
    pub alpha: f64,
    pub alpha_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    GaussianDecay,
    Parabola,
}

impl FitModel {
    pub fn name(self) -> &'static str {
        match self {
            FitModel::GaussianDecay => "gaussian_decay",
            FitModel::Parabola => "parabola",
        }
    }

    pub fn eval(self, p: &[f64; 3], s: f64) -> f64 {
        match self {
            FitModel::GaussianDecay => p[0] * (-p[1] * s * s).exp() + p[2],
            FitModel::Parabola => (p[0] * s + p[1]) * s + p[2],
        }
    }

    /// Partial derivatives with respect to `(a, b, c)`.
    pub fn gradient(self, p: &[f64; 3], s: f64) -> [f64; 3] {
        match self {
            FitModel::GaussianDecay => {
                let e = (-p[1] * s * s).exp();
                [e, -p[0] * s * s * e, 1.0]
            }
            FitModel::Parabola => [s * s, s, 1.0],
        }
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "gaussian_decay" | "gaussian" | "gauss" => Ok(FitModel::GaussianDecay),
            "parabola" | "quadratic" => Ok(FitModel::Parabola),
            other => Err(Error::Domain(format!("unknown fit model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub params: [f64; 3],
    /// Half-widths of the 95% confidence intervals.
    pub ci95: [f64; 3],
    pub lsq_error: f64,
}

/// Characteristic point of a fitted curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "sigma", rename_all = "snake_case")]
pub enum Feature {
    InflectionPoint(f64),
    Minimum(f64),
}

#[derive(Serialize)]
struct FitReport<'a> {
    #[serde(flatten)]
    fit: &'a FitResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    feature: Option<Feature>,
}

impl FitResult {
    pub fn predict(&self, s: f64) -> f64 {
        self.model.eval(&self.params, s)
    }

    /// Inflection point of a Gaussian decay, minimum of a parabola, when defined.
    pub fn feature(&self) -> Option<Feature> {
        match self.model {
            FitModel::GaussianDecay => inflection_point(self).ok().map(Feature::InflectionPoint),
            FitModel::Parabola => parabola_minimum(self).ok().map(Feature::Minimum),
        }
    }

    /// JSON value including the derived feature.
    pub fn to_value(&self) -> serde_json::Value {
        let report = FitReport {
            fit: self,
            feature: self.feature(),
        };
        serde_json::to_value(report).expect("fit report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("fit report serializes")
    }
}

/// Unit-weight residual sum of squares.
pub fn chi2(model: FitModel, params: &[f64; 3], points: &[ResponsePoint]) -> f64 {
    points
        .iter()
        .map(|pt| (pt.alpha - model.eval(params, pt.sigma)).powi(2))
        .sum()
}

/// `sqrt(chi2 / (N - 3))` with unit per-point deviation.
pub fn chi2_error(model: FitModel, params: &[f64; 3], points: &[ResponsePoint]) -> Result<f64> {
    chi2_error_scaled(model, params, points, 1.0)
}

/// `sqrt(s^2 chi2 / (N - 3))` for a common per-point deviation `s`.
pub fn chi2_error_scaled(
    model: FitModel,
    params: &[f64; 3],
    points: &[ResponsePoint],
    point_sigma: f64,
) -> Result<f64> {
    let n = points.len();
    if n <= M {
        return Err(Error::Underdetermined(format!(
            "{n} points cannot estimate the error of a {M}-parameter fit"
        )));
    }
    Ok((point_sigma * point_sigma * chi2(model, params, points) / (n - M) as f64).sqrt())
}

/// `1/sqrt(2b)`, where the second derivative of `a exp(-b s^2)` vanishes.
pub fn inflection_point(f: &FitResult) -> Result<f64> {
    if f.model != FitModel::GaussianDecay {
        return Err(Error::Domain(
            "inflection point needs a gaussian_decay fit".into(),
        ));
    }
    let b = f.params[1];
    if !(b > 0.0) {
        return Err(Error::Domain(format!("no inflection point for b = {b}")));
    }
    Ok(1.0 / (2.0 * b).sqrt())
}

/// Vertex `-b/(2a)` of an upward parabola.
pub fn parabola_minimum(f: &FitResult) -> Result<f64> {
    if f.model != FitModel::Parabola {
        return Err(Error::Domain("minimum needs a parabola fit".into()));
    }
    let [a, b, _] = f.params;
    if !(a > 0.0) {
        return Err(Error::Domain(format!(
            "parabola with a = {a} has no minimum"
        )));
    }
    Ok(-b / (2.0 * a))
}

fn check_points(points: &[ResponsePoint]) -> Result<()> {
    if points.len() <= M {
        return Err(Error::Underdetermined(format!(
            "need at least {} points, got {}",
            M + 1,
            points.len()
        )));
    }
    for p in points {
        if !p.sigma.is_finite() || p.sigma < 0.0 || !p.alpha.is_finite() {
            return Err(Error::Domain(format!(
                "invalid response point (sigma = {}, alpha = {})",
                p.sigma, p.alpha
            )));
        }
    }
    Ok(())
}

/// `J^T J` and `J^T r` at `params`.
fn normal_equations(
    model: FitModel,
    params: &[f64; 3],
    points: &[ResponsePoint],
) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for pt in points {
        let g = Vector3::from(model.gradient(params, pt.sigma));
        let r = pt.alpha - model.eval(params, pt.sigma);
        jtj += g * g.transpose();
        jtr += g * r;
    }
    (jtj, jtr)
}

fn pseudo_solve(a: &Matrix3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    let svd = a.svd(true, true);
    let eps = 1e-14 * svd.singular_values.max();
    svd.solve(b, eps).unwrap_or_else(|_| Vector3::zeros())
}

fn covariance_ci(jtj: &Matrix3<f64>, chi2_min: f64, n: usize) -> [f64; 3] {
    let s2 = chi2_min / (n - M) as f64;
    let inv = jtj.try_inverse().unwrap_or_else(|| {
        jtj.pseudo_inverse(1e-14 * jtj.abs().max())
            .unwrap_or_else(|_| Matrix3::zeros())
    });
    std::array::from_fn(|i| Z95 * (s2 * inv[(i, i)]).max(0.0).sqrt())
}

fn finish(model: FitModel, params: [f64; 3], points: &[ResponsePoint]) -> Result<FitResult> {
    let (jtj, _) = normal_equations(model, &params, points);
    let chi2_min = chi2(model, &params, points);
    Ok(FitResult {
        model,
        params,
        ci95: covariance_ci(&jtj, chi2_min, points.len()),
        lsq_error: chi2_error(model, &params, points)?,
    })
}

/// Damped Gauss-Newton fit of `a exp(-b s^2) + c`.
pub fn fit_gaussian_model(points: &[ResponsePoint]) -> Result<FitResult> {
    check_points(points)?;
    let lo = points.iter().map(|p| p.sigma).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.sigma).fold(0.0, f64::max);
    if !(hi > 0.0 && hi >= 3.0 * lo) {
        return Err(Error::Domain(format!(
            "strengths must span a factor of 3, got [{lo}, {hi}]"
        )));
    }

    let model = FitModel::GaussianDecay;
    let a_max = points
        .iter()
        .map(|p| p.alpha)
        .fold(f64::NEG_INFINITY, f64::max);
    let a_min = points.iter().map(|p| p.alpha).fold(f64::INFINITY, f64::min);
    let mut params = [a_max - a_min, 1.0, a_min];
    let mut current = chi2(model, &params, points);
    let mut lambda = 1e-3;

    for _ in 0..MAX_ITERATIONS {
        if current == 0.0 {
            return finish(model, params, points);
        }
        let (jtj, jtr) = normal_equations(model, &params, points);
        let mut damped = jtj;
        for i in 0..M {
            damped[(i, i)] *= 1.0 + lambda;
        }
        let delta = pseudo_solve(&damped, &jtr);
        let trial = [
            params[0] + delta[0],
            params[1] + delta[1],
            params[2] + delta[2],
        ];
        let trial_chi2 = chi2(model, &trial, points);
        let small = (0..M).all(|i| delta[i].abs() < STEP_TOLERANCE * params[i].abs().max(1.0));
        if trial_chi2.is_finite() && trial_chi2 <= current {
            params = trial;
            current = trial_chi2;
            lambda = (lambda * 0.1).max(1e-12);
        } else {
            lambda *= 10.0;
        }
        if small || lambda > 1e16 {
            return finish(model, params, points);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        chi2: current,
        params,
    })
}

/// Linear least squares of `a s^2 + b s + c` through the normal equations.
pub fn fit_parabola(points: &[ResponsePoint]) -> Result<FitResult> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.sigma).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < M {
        return Err(Error::Domain(format!(
            "a parabola needs at least 3 distinct strengths, got {}",
            distinct.len()
        )));
    }
    check_points(points)?;

    let model = FitModel::Parabola;
    let (xtx, xty) = normal_equations(model, &[0.0; 3], points);
    let params = xtx
        .cholesky()
        .map(|c| c.solve(&xty))
        .ok_or_else(|| Error::Domain("parabola design matrix is rank deficient".into()))?;
    finish(model, [params[0], params[1], params[2]], points)
}

/// Fits `model` to `points`.
pub fn fit(model: FitModel, points: &[ResponsePoint]) -> Result<FitResult> {
    match model {
        FitModel::GaussianDecay => fit_gaussian_model(points),
        FitModel::Parabola => fit_parabola(points),
    }
}
