//! Quenched disorder averaging of the walker's spread.
//!
//! Each (step count, configuration index) cell owns an RNG stream seeded by a
//! fixed hash of `(master_seed, t, index)`, so results do not depend on
//! evaluation order or on how many threads share the work. Configurations are
//! drawn afresh for every step count.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::biased_hadamard;
use crate::disorder::DisorderSpec;
use crate::error::{Error, Result};
use crate::walk::{evolve_matrices, position_distribution, position_std};

/// Step counts 8, 10, ..., 24.
pub fn default_times() -> Vec<usize> {
    (8..=24).step_by(2).collect()
}

pub const DEFAULT_N_CONFIGS: usize = 5000;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a path of labels into a seed: `mix(...mix(mix(master) ^ l0) ^ l1...)`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(master), |h, &label| mix64(h ^ label))
}

/// Seed of the stream for configuration `index` at step count `t`.
pub fn configuration_seed(master_seed: u64, t: usize, index: usize) -> u64 {
    derive_seed(master_seed, &[t as u64, index as u64])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub spec: DisorderSpec,
    pub times: Vec<usize>,
    pub n_configs: usize,
    pub master_seed: u64,
}

impl SweepPlan {
    pub fn new(
        spec: DisorderSpec,
        times: Vec<usize>,
        n_configs: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let plan = Self {
            spec,
            times,
            n_configs,
            master_seed,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        validate_times(&self.times)?;
        if self.n_configs < 2 {
            return Err(Error::Domain(format!(
                "n_configs must be at least 2, got {}",
                self.n_configs
            )));
        }
        Ok(())
    }
}

pub(crate) fn validate_times(times: &[usize]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Domain("times must not be empty".into()));
    }
    if times[0] < 1 {
        return Err(Error::Domain("step counts must be at least 1".into()));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("times must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadRow {
    pub t: usize,
    pub mean_sigma: f64,
    pub std_error: f64,
    pub n_configs: usize,
}

/// Disorder-averaged spread per step count.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpreadSeries {
    pub rows: Vec<SpreadRow>,
}

pub const SPREAD_CSV_HEADER: &str = "t,mean_sigma,std_error,n_configs";

impl SpreadSeries {
    /// Builds a row from per-configuration spreads.
    pub fn row_from_samples(t: usize, samples: &[f64]) -> SpreadRow {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        SpreadRow {
            t,
            mean_sigma: mean,
            std_error: (var / n as f64).sqrt(),
            n_configs: n,
        }
    }

    /// CSV with the fixed column order; `comment` becomes a leading `# ` line.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str(SPREAD_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.t, r.mean_sigma, r.std_error, r.n_configs
            );
        }
        out
    }
}

/// Spread of one disorder configuration with `t` steps.
pub fn run_configuration(spec: &DisorderSpec, t: usize, config_seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(config_seed);
    let coins: Vec<_> = (0..t)
        .map(|_| biased_hadamard(spec.sample(&mut rng)))
        .collect();
    position_std(&position_distribution(&evolve_matrices(&coins)))
}

/// Per-configuration spreads, `values[time_index][config_index]`.
pub fn configuration_spreads(plan: &SweepPlan) -> Vec<Vec<f64>> {
    let n = plan.n_configs;
    let flat: Vec<f64> = (0..plan.times.len() * n)
        .into_par_iter()
        .map(|cell| {
            let t = plan.times[cell / n];
            run_configuration(
                &plan.spec,
                t,
                configuration_seed(plan.master_seed, t, cell % n),
            )
        })
        .collect();
    flat.chunks(n).map(<[f64]>::to_vec).collect()
}

/// Quenched average over the rayon pool currently in scope.
pub fn quenched_sweep(plan: &SweepPlan) -> Result<SpreadSeries> {
    plan.validate()?;
    let values = configuration_spreads(plan);
    Ok(SpreadSeries {
        rows: plan
            .times
            .iter()
            .zip(&values)
            .map(|(&t, v)| SpreadSeries::row_from_samples(t, v))
            .collect(),
    })
}

/// Runs `f` on a dedicated pool of `workers` threads (`0` means the rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool")
        .install(f)
}

/// [`quenched_sweep`] on `workers` threads.
pub fn quenched_sweep_with_workers(plan: &SweepPlan, workers: usize) -> Result<SpreadSeries> {
    with_workers(workers, || quenched_sweep(plan))
}

/// Spread of the disorder-free Hadamard walk.
pub fn ordered_spread(t: usize) -> f64 {
    let coins = vec![biased_hadamard(crate::coin::CoinParams::hadamard()); t];
    position_std(&position_distribution(&evolve_matrices(&coins)))
}

/// Exact series of the classical random walk, `sigma(t) = sqrt(t)` from the binomial distribution.
pub fn classical_series(times: &[usize]) -> SpreadSeries {
    SpreadSeries {
        rows: times
            .iter()
            .map(|&t| SpreadRow {
                t,
                mean_sigma: position_std(&crate::walk::classical_distribution(t)),
                std_error: 0.0,
                n_configs: 1,
            })
            .collect(),
    }
}
