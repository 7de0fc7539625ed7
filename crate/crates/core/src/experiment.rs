//! Reproducible experiments driven by a TOML configuration.
//!
//! A configuration names a disorder family (by native parameter or by target
//! strength), the step counts, ensemble size and master seed, and optionally a
//! strength grid for response curves. Every artifact carries a short hash of
//! the result-relevant part of the configuration; the worker count and output
//! path are excluded, since they cannot change results.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::disorder::{
    sigma_dis_with_route, strength_range, strength_to_param, DisorderKind, DisorderSpec,
};
use crate::error::{Error, Result};
use crate::quench::{
    classical_series, default_times, derive_seed, quenched_sweep, validate_times, with_workers,
    SpreadSeries, SweepPlan, DEFAULT_N_CONFIGS,
};
use crate::response::{fit, FitModel, FitResult, ResponsePoint};
use crate::scaling::{fit_alpha, ScalingResult};

/// Version tag written into every artifact header.
pub const FORMAT_VERSION: u32 = 1;

pub const RESPONSE_CSV_HEADER: &str = "sigma,alpha,alpha_err";

pub const DEFAULT_GRID_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    pub kind: DisorderKind,
    /// Native parameter (`r`, `kappa`, `d`, `delta` or `rho`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    /// Target disorder strength, inverted to a parameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
}

impl DistributionConfig {
    pub fn spec(&self) -> Result<DisorderSpec> {
        match (self.param, self.strength) {
            (Some(p), None) => self.kind.with_param(p),
            (None, Some(s)) => strength_to_param(self.kind, s),
            (Some(_), Some(_)) => Err(Error::Config(
                "distribution: give either `param` or `strength`, not both".into(),
            )),
            (None, None) => Err(Error::Config(
                "distribution: one of `param` or `strength` is required".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub times: Vec<usize>,
    pub n_configs: usize,
    pub master_seed: u64,
    /// Use the exact binomial spread of the classical walk instead of disorder.
    pub classical: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            times: default_times(),
            n_configs: DEFAULT_N_CONFIGS,
            master_seed: 0,
            classical: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResponseConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<FitModel>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Output path prefix; `.csv` and `.json` are appended.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Worker threads, `0` for the default pool.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionConfig>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub response: ResponseConfig,
    #[serde(default)]
    pub run: RunConfig,
}

#[derive(Serialize)]
struct HashedPart<'a> {
    version: u32,
    distribution: &'a Option<DistributionConfig>,
    sweep: &'a SweepConfig,
    response: &'a ResponseConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }

    /// First 16 hex digits of the SHA-256 of the result-relevant fields.
    pub fn config_hash(&self) -> String {
        let part = HashedPart {
            version: FORMAT_VERSION,
            distribution: &self.distribution,
            sweep: &self.sweep,
            response: &self.response,
        };
        let bytes = serde_json::to_vec(&part).expect("configuration serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }

    pub fn spec(&self) -> Result<DisorderSpec> {
        self.distribution
            .as_ref()
            .ok_or_else(|| Error::Config("missing [distribution] section".into()))?
            .spec()
    }

    fn kind(&self) -> Result<DisorderKind> {
        self.distribution
            .as_ref()
            .map(|d| d.kind)
            .ok_or_else(|| Error::Config("missing [distribution] section".into()))
    }

    fn validate_sweep(&self) -> Result<()> {
        validate_times(&self.sweep.times)
            .map_err(|e| Error::Config(format!("sweep.times: {e}")))?;
        if self.sweep.n_configs < 2 {
            return Err(Error::Config(format!(
                "sweep.n_configs must be at least 2, got {}",
                self.sweep.n_configs
            )));
        }
        Ok(())
    }

    /// Checks everything a sweep needs.
    pub fn validate_for_sweep(&self) -> Result<()> {
        self.validate_sweep()?;
        if !self.sweep.classical {
            self.spec()?;
        }
        Ok(())
    }

    pub fn sigma_grid(&self) -> Result<Vec<f64>> {
        match &self.response.sigma_grid {
            Some(g) => Ok(g.clone()),
            None => Ok(default_sigma_grid(self.kind()?)),
        }
    }

    pub fn fit_model(&self) -> Result<FitModel> {
        Ok(self.response.model.unwrap_or(default_model(self.kind()?)))
    }

    /// Checks everything a response run needs, including that the grid can be fitted.
    pub fn validate_for_response(&self) -> Result<()> {
        self.validate_sweep()?;
        if self.sweep.classical {
            return Err(Error::Config(
                "response curves need a disorder distribution, not the classical reference".into(),
            ));
        }
        let kind = self.kind()?;
        let grid = self.sigma_grid()?;
        if grid.len() < 4 {
            return Err(Error::Underdetermined(format!(
                "a 3-parameter fit needs at least 4 strengths, the grid has {}",
                grid.len()
            )));
        }
        let (lo, hi) = strength_range(kind);
        for &s in &grid {
            if !(s >= lo && s <= hi) {
                return Err(Error::StrengthOutOfRange {
                    kind: kind.name(),
                    target: s,
                    min: lo,
                    max: hi,
                });
            }
        }
        Ok(())
    }
}

/// Parabola for Cauchy-Lorentz I, whose response is not monotone; Gaussian decay otherwise.
pub fn default_model(kind: DisorderKind) -> FitModel {
    match kind {
        DisorderKind::Cl1 => FitModel::Parabola,
        _ => FitModel::GaussianDecay,
    }
}

/// Twenty evenly spaced strengths across the useful range of `kind`.
pub fn default_sigma_grid(kind: DisorderKind) -> Vec<f64> {
    let (lo, hi) = match kind {
        DisorderKind::Uniform | DisorderKind::Vmf | DisorderKind::Cl2 => (0.05, 1.71),
        DisorderKind::Circular => (0.05, FRAC_PI_2),
        // Strengths below ~0.09 need |ln delta| > 300; the minimum sits near 1.7.
        DisorderKind::Cl1 => (0.5, 2.8),
    };
    let n = DEFAULT_GRID_POINTS;
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `x` rounded to `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One-line strength report for a spec.
pub fn sigma_report(spec: &DisorderSpec) -> String {
    let (s, route) = sigma_dis_with_route(spec);
    format!("{spec}: sigma_dis = {} ({route})", format_significant(s, 6))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub series: SpreadSeries,
    pub scaling: ScalingResult,
    pub csv: String,
    pub json: String,
}

fn header(kind: &str, hash: &str) -> String {
    format!("glassy-walk {kind} v{FORMAT_VERSION} config={hash}")
}

/// Quenched sweep plus exponent fit.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate_for_sweep()?;
    let hash = cfg.config_hash();
    let (series, source) = if cfg.sweep.classical {
        (classical_series(&cfg.sweep.times), "classical".to_string())
    } else {
        let spec = cfg.spec()?;
        let plan = SweepPlan::new(
            spec,
            cfg.sweep.times.clone(),
            cfg.sweep.n_configs,
            cfg.sweep.master_seed,
        )?;
        let series = with_workers(cfg.run.workers, || quenched_sweep(&plan))?;
        (series, spec.to_string())
    };
    let scaling = fit_alpha(&series)?;
    let json = serde_json::json!({
        "format": FORMAT_VERSION,
        "config_hash": hash,
        "source": source,
        "times": cfg.sweep.times,
        "n_configs": series.rows[0].n_configs,
        "master_seed": cfg.sweep.master_seed,
        "scaling": scaling,
    });
    Ok(SweepOutput {
        csv: series.to_csv(Some(&header("spread", &hash))),
        json: serde_json::to_string_pretty(&json).expect("json") + "\n",
        series,
        scaling,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseOutput {
    pub points: Vec<ResponsePoint>,
    pub fit: FitResult,
    pub csv: String,
    pub json: String,
}

/// Response points for every strength of the grid.
///
/// Grid point `g` uses master seed `derive_seed(master_seed, [g])`.
pub fn response_points(cfg: &ExperimentConfig) -> Result<Vec<ResponsePoint>> {
    cfg.validate_for_response()?;
    let kind = cfg.kind()?;
    let grid = cfg.sigma_grid()?;
    with_workers(cfg.run.workers, || {
        grid.iter()
            .enumerate()
            .map(|(g, &sigma)| {
                let spec = strength_to_param(kind, sigma)?;
                let seed = derive_seed(cfg.sweep.master_seed, &[g as u64]);
                let plan =
                    SweepPlan::new(spec, cfg.sweep.times.clone(), cfg.sweep.n_configs, seed)?;
                let scaling = fit_alpha(&quenched_sweep(&plan)?)?;
                Ok(ResponsePoint {
                    sigma,
                    alpha: scaling.alpha,
                    alpha_err: scaling.alpha_std_error,
                })
            })
            .collect()
    })
}

/// Response curve plus the model fit.
pub fn run_response(cfg: &ExperimentConfig) -> Result<ResponseOutput> {
    let points = response_points(cfg)?;
    let model = cfg.fit_model()?;
    let fitted = fit(model, &points)?;
    let hash = cfg.config_hash();
    let json = serde_json::json!({
        "format": FORMAT_VERSION,
        "config_hash": hash,
        "distribution": cfg.kind()?,
        "fit": fitted.to_value(),
    });
    Ok(ResponseOutput {
        csv: response_points_to_csv(&points, Some(&header("response", &hash))),
        json: serde_json::to_string_pretty(&json).expect("json") + "\n",
        points,
        fit: fitted,
    })
}

pub fn response_points_to_csv(points: &[ResponsePoint], comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(RESPONSE_CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.sigma, p.alpha, p.alpha_err);
    }
    out
}

/// Parses `sigma,alpha,alpha_err` rows; `#` lines are comments.
pub fn response_points_from_csv(text: &str) -> Result<Vec<ResponsePoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Config(format!("csv header: {e}")))?;
    let names: Vec<&str> = headers.iter().collect();
    if names != ["sigma", "alpha", "alpha_err"] {
        return Err(Error::Config(format!(
            "csv header must be `{RESPONSE_CSV_HEADER}`, found `{}`",
            names.join(",")
        )));
    }
    reader
        .deserialize()
        .map(|row| row.map_err(|e| Error::Config(format!("csv: {e}"))))
        .collect()
}

/// Fits points read from a response CSV.
pub fn fit_csv(text: &str, model: FitModel) -> Result<FitResult> {
    fit(model, &response_points_from_csv(text)?)
}
