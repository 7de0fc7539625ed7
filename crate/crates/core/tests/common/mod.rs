//! Checks shared by the property tests and the acceptance harness.
//! Each returns `Err` with a description of the first violation.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use glassy_walk::disorder::{sigma_dis, DisorderSpec};
use glassy_walk::quadrature::adaptive_simpson;
use glassy_walk::quench::{ordered_spread, quenched_sweep_with_workers, SweepPlan};
use glassy_walk::walk::position_distribution;
use glassy_walk::{
    biased_hadamard, default_k_points, evolve, momentum_evolve, CoinParams, SpherePoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_coin<R: Rng>(rng: &mut R) -> CoinParams {
    CoinParams::new(rng.gen::<f64>() * PI, rng.gen::<f64>() * TAU).unwrap()
}

pub fn random_config<R: Rng>(rng: &mut R, t: usize) -> Vec<CoinParams> {
    (0..t).map(|_| random_coin(rng)).collect()
}

pub fn unitarity(n: usize) -> Check {
    let mut r = rng(1);
    for _ in 0..n {
        let p = random_coin(&mut r);
        let defect = biased_hadamard(p).unitarity_defect();
        if defect > 1e-12 {
            return Err(format!("{p:?}: |M^dag M - I| = {defect:e}"));
        }
    }
    Ok(())
}

pub fn norm_conservation(trials: usize, steps: usize) -> Check {
    let mut r = rng(2);
    for _ in 0..trials {
        let s = evolve(&random_config(&mut r, steps));
        let drift = (s.norm_sqr() - 1.0).abs();
        if drift > 1e-9 {
            return Err(format!("norm drift {drift:e} after {steps} steps"));
        }
    }
    Ok(())
}

/// Sites of the wrong parity carry exactly zero amplitude.
pub fn parity(trials: usize, max_t: usize) -> Check {
    let mut r = rng(3);
    for _ in 0..trials {
        let t = r.gen_range(0..=max_t);
        let s = evolve(&random_config(&mut r, t));
        for n in -(t as i64)..=t as i64 {
            if (n + t as i64) % 2 != 0 {
                let a = s.at(n);
                if a[0].re != 0.0 || a[0].im != 0.0 || a[1].re != 0.0 || a[1].im != 0.0 {
                    return Err(format!("t = {t}: site {n} has amplitude {a:?}"));
                }
            }
        }
    }
    Ok(())
}

/// Largest amplitude difference between the two representations.
pub fn momentum_equivalence(trials: usize, max_t: usize) -> Result<f64, String> {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let t = r.gen_range(1..=max_t);
        let config = random_config(&mut r, t);
        let k = momentum_evolve(&config, default_k_points(t)).map_err(|e| e.to_string())?;
        worst = worst.max(evolve(&config).max_abs_diff(&k));
    }
    if worst < 1e-10 {
        Ok(worst)
    } else {
        Err(format!("L-inf difference {worst:e}"))
    }
}

/// Real coins keep the distribution of the symmetric initial state mirror-symmetric.
pub fn reflection(trials: usize, max_t: usize) -> Check {
    let mut r = rng(5);
    for _ in 0..trials {
        let t = r.gen_range(1..=max_t);
        let config: Vec<_> = (0..t)
            .map(|_| CoinParams::new(r.gen::<f64>() * PI, 0.0).unwrap())
            .collect();
        let d = position_distribution(&evolve(&config));
        for n in 0..=t as i64 {
            let gap = (d.prob(n) - d.prob(-n)).abs();
            if gap > 1e-10 {
                return Err(format!("t = {t}: |p({n}) - p(-{n})| = {gap:e}"));
            }
        }
    }
    Ok(())
}

/// Chi-square p-value of a 50-bin polar-angle histogram against `pdf_polar`.
/// Bins with fewer than 5 expected counts are merged into their neighbour.
pub fn sampler_p_value(spec: &DisorderSpec, samples: usize, seed: u64) -> f64 {
    const BINS: usize = 50;
    let width = PI / BINS as f64;
    let mut observed = [0u64; BINS];
    let mut r = rng(seed);
    for _ in 0..samples {
        let angle = spec
            .sample_point(&mut r)
            .geodesic_distance(&SpherePoint::MEAN_DIRECTION);
        observed[((angle / width) as usize).min(BINS - 1)] += 1;
    }
    let pdf = |x: f64| spec.pdf_polar(x.clamp(0.0, PI)).unwrap();
    let expected: Vec<f64> = (0..BINS)
        .map(|i| {
            let (a, b) = (i as f64 * width, (i + 1) as f64 * width);
            // Split the bin so peaks narrower than the bin are still resolved.
            (0..16)
                .map(|j| {
                    let h = (b - a) / 16.0;
                    adaptive_simpson(&pdf, a + j as f64 * h, a + (j + 1) as f64 * h, 1e-13, 50)
                })
                .sum::<f64>()
                * samples as f64
        })
        .collect();

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for i in 0..BINS {
        o_acc += observed[i] as f64;
        e_acc += expected[i];
        if e_acc >= 5.0 {
            cells.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += o_acc;
        last.1 += e_acc;
    }
    if cells.len() < 2 {
        return 1.0;
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dist = ChiSquared::new((cells.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

/// Specs with a continuous polar density and enough spread for a histogram test.
pub fn histogram_specs() -> Vec<DisorderSpec> {
    vec![
        DisorderSpec::Uniform { r: 0.7 },
        DisorderSpec::Uniform { r: 2.0 },
        DisorderSpec::Vmf { kappa: 10.0 },
        DisorderSpec::Vmf { kappa: 0.5 },
        DisorderSpec::Cl1 { delta: 10.0 },
        DisorderSpec::Cl1 { delta: 0.3 },
        DisorderSpec::Cl2 { rho: 0.7 },
        DisorderSpec::Cl2 { rho: 0.3 },
    ]
}

pub fn sampler_agreement(samples: usize) -> Check {
    for (i, spec) in histogram_specs().iter().enumerate() {
        let p = sampler_p_value(spec, samples, 100 + i as u64);
        if p <= 0.01 {
            return Err(format!("{spec}: chi-square p = {p:.4}"));
        }
    }
    Ok(())
}

/// Angle between the empirical mean of `samples` draws and `(1, 0, 0)`.
pub fn mean_direction_error(spec: &DisorderSpec, samples: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
    for _ in 0..samples {
        let p = spec.sample_point(&mut r);
        x += p.x;
        y += p.y;
        z += p.z;
    }
    let norm = (x * x + y * y + z * z).sqrt();
    SpherePoint {
        x: x / norm,
        y: y / norm,
        z: z / norm,
    }
    .geodesic_distance(&SpherePoint::MEAN_DIRECTION)
}

pub fn mean_direction(samples: usize) -> Check {
    let specs = [
        DisorderSpec::Uniform { r: 1.3 },
        DisorderSpec::Vmf { kappa: 0.5 },
        DisorderSpec::Vmf { kappa: 50.0 },
        DisorderSpec::Circular { d: 1.2 },
        DisorderSpec::Cl1 { delta: 3.0 },
        DisorderSpec::Cl2 { rho: 0.5 },
    ];
    for (i, spec) in specs.iter().enumerate() {
        let err = mean_direction_error(spec, samples, 200 + i as u64);
        if err >= 1e-2 {
            return Err(format!("{spec}: mean direction off by {err:.4} rad"));
        }
    }
    Ok(())
}

fn strictly_monotone(values: &[f64], increasing: bool, label: &str) -> Check {
    for w in values.windows(2) {
        let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
        if !ok {
            return Err(format!("{label}: {} then {}", w[0], w[1]));
        }
    }
    Ok(())
}

pub fn strength_monotonicity() -> Check {
    let kappas: Vec<f64> = (-10..=25).map(|i| 10f64.powf(i as f64 * 0.2)).collect();
    let v: Vec<f64> = kappas
        .iter()
        .map(|&k| sigma_dis(&DisorderSpec::Vmf { kappa: k }))
        .collect();
    strictly_monotone(&v, false, "vmf in kappa")?;
    let rhos: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
    let v: Vec<f64> = rhos
        .iter()
        .map(|&r| sigma_dis(&DisorderSpec::Cl2 { rho: r }))
        .collect();
    strictly_monotone(&v, false, "cl2 in rho")?;
    let rs: Vec<f64> = (1..=100).map(|i| i as f64 / 50.0).collect();
    let v: Vec<f64> = rs
        .iter()
        .map(|&r| sigma_dis(&DisorderSpec::Uniform { r }))
        .collect();
    strictly_monotone(&v, true, "uniform in r")?;
    let ds: Vec<f64> = (0..=100).map(|i| i as f64 * PI / 100.0).collect();
    let v: Vec<f64> = ds
        .iter()
        .map(|&d| sigma_dis(&DisorderSpec::Circular { d }))
        .collect();
    strictly_monotone(&v, true, "circular in d")
}

pub fn strength_limits() -> Check {
    let flat = sigma_dis(&DisorderSpec::Vmf { kappa: 1e-7 });
    if (flat - 1.713).abs() > 1e-2 {
        return Err(format!("vmf kappa -> 0 gives {flat}"));
    }
    let point = sigma_dis(&DisorderSpec::Cl2 { rho: 1.0 - 1e-9 });
    if point > 1e-3 {
        return Err(format!("cl2 rho -> 1 gives {point}"));
    }
    Ok(())
}

pub fn worker_determinism() -> Check {
    let plan = SweepPlan::new(DisorderSpec::Vmf { kappa: 3.0 }, vec![8, 16, 24], 400, 77).unwrap();
    let base = quenched_sweep_with_workers(&plan, 1).unwrap().to_csv(None);
    for workers in [4, 16] {
        let other = quenched_sweep_with_workers(&plan, workers)
            .unwrap()
            .to_csv(None);
        if other != base {
            return Err(format!("{workers} workers changed the output"));
        }
    }
    Ok(())
}

/// Disorder specs with strength at most pi/2 used for the ordering check.
pub fn bracketing_specs() -> Vec<DisorderSpec> {
    vec![
        DisorderSpec::Uniform { r: 0.1 },
        DisorderSpec::Uniform { r: 0.7 },
        DisorderSpec::Uniform { r: 1.3 },
        DisorderSpec::Vmf { kappa: 100.0 },
        DisorderSpec::Vmf { kappa: 10.0 },
        DisorderSpec::Vmf { kappa: 1.0 },
        DisorderSpec::Circular { d: 0.3 },
        DisorderSpec::Circular { d: 1.0 },
        DisorderSpec::Circular { d: PI / 2.0 },
        DisorderSpec::Cl1 { delta: 1e4 },
        DisorderSpec::Cl1 { delta: 10.0 },
        DisorderSpec::Cl2 { rho: 0.98 },
        DisorderSpec::Cl2 { rho: 0.7 },
        DisorderSpec::Cl2 { rho: 0.2 },
    ]
}

/// Specs up to strength 1.1, where the lower bound holds with a wide margin.
pub fn moderate_specs() -> Vec<DisorderSpec> {
    bracketing_specs()
        .into_iter()
        .filter(|s| sigma_dis(s) <= 1.1)
        .collect()
}

/// Which side of the `sqrt(t) < <sigma(t)> < sigma_ordered(t)` bracket to check.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Bounds {
    Both,
    UpperOnly,
}

/// The bracket with three standard errors of margin, for every spec and t in 8..24.
pub fn bracketing(specs: &[DisorderSpec], n_configs: usize, bounds: Bounds) -> Check {
    let times: Vec<usize> = (8..=24).step_by(2).collect();
    let mut failures = Vec::new();
    for &spec in specs {
        let s = sigma_dis(&spec);
        if s > PI / 2.0 + 1e-12 {
            return Err(format!("{spec} has strength {s} above pi/2"));
        }
        let plan = SweepPlan::new(spec, times.clone(), n_configs, 31).unwrap();
        let series = quenched_sweep_with_workers(&plan, 0).unwrap();
        for row in &series.rows {
            let lo = (row.t as f64).sqrt();
            let hi = ordered_spread(row.t);
            let margin = 3.0 * row.std_error;
            let above = row.mean_sigma - margin > lo;
            let below = row.mean_sigma + margin < hi;
            if !below || (bounds == Bounds::Both && !above) {
                failures.push(format!(
                    "{spec} (strength {s:.3}), t = {}: {:.4} +/- {:.4} outside ({lo:.4}, {hi:.4})",
                    row.t, row.mean_sigma, margin
                ));
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(format!(
            "{} violations; first: {}",
            failures.len(),
            failures[0]
        ))
    }
}

/// Standard error shrinks as `1/sqrt(n)`: quadrupling `n` halves it, within 20%.
pub fn error_convergence() -> Check {
    let spec = DisorderSpec::Uniform { r: 0.8 };
    let se = |n: usize| {
        let plan = SweepPlan::new(spec, vec![16], n, 13).unwrap();
        quenched_sweep_with_workers(&plan, 0).unwrap().rows[0].std_error
    };
    let ratio = se(1000) / se(4000);
    if (ratio / 2.0 - 1.0).abs() > 0.2 {
        return Err(format!(
            "std_error ratio 1000 -> 4000 is {ratio:.3}, expected 2"
        ));
    }
    Ok(())
}
