//! Momentum-space evolution, an independent route to the same walker state.
//!
//! With the transform `psi(k) = sum_n psi(n) e^{-ikn}` the step becomes a
//! per-momentum 2x2 matrix
//!
//! ```text
//! M_k = [[e^{-ik} cos(theta/2),          e^{-ik} sin(theta/2)          ],
//!        [e^{ik} sin(theta/2) e^{i phi}, -e^{ik} cos(theta/2) e^{i phi}]]
//! ```
//!
//! acting on `[psi_0, psi_1]`. The state has finite support, so a discrete
//! grid of at least `2t + 1` momenta represents it without aliasing.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::coin::{biased_hadamard, CoinMatrix, CoinParams};
use crate::error::{Error, Result};
use crate::walk::WalkerState;

/// Smallest power of two that is at least `4t + 4`.
pub fn default_k_points(steps: usize) -> usize {
    (4 * steps + 4).next_power_of_two()
}

/// `M_k` for a coin and a momentum `k` in radians.
pub fn momentum_matrix(coin: &CoinMatrix, k: f64) -> CoinMatrix {
    let left = Complex64::from_polar(1.0, -k);
    let right = Complex64::from_polar(1.0, k);
    let m = &coin.0;
    CoinMatrix([
        [left * m[0][0], left * m[0][1]],
        [right * m[1][0], right * m[1][1]],
    ])
}

fn check_grid(steps: usize, k_points: usize) -> Result<()> {
    let min = 2 * steps + 1;
    if k_points < min {
        return Err(Error::MomentumGridTooSmall {
            k_points,
            steps,
            min,
        });
    }
    Ok(())
}

/// Evolves the initial state through `config` in momentum space.
pub fn momentum_evolve(config: &[CoinParams], k_points: usize) -> Result<WalkerState> {
    let steps = config.len();
    check_grid(steps, k_points)?;
    let coins: Vec<CoinMatrix> = config.iter().map(|&p| biased_hadamard(p)).collect();
    Ok(transform_evolve(steps, k_points, |k, v| {
        coins
            .iter()
            .fold(v, |acc, coin| momentum_matrix(coin, k).apply(acc))
    }))
}

/// Evolves through `steps` identical coins by raising `M_k` to a power at each momentum.
pub fn momentum_evolve_repeated(
    coin: CoinParams,
    steps: usize,
    k_points: usize,
) -> Result<WalkerState> {
    check_grid(steps, k_points)?;
    let coin = biased_hadamard(coin);
    Ok(transform_evolve(steps, k_points, |k, v| {
        matrix_power(&momentum_matrix(&coin, k), steps).apply(v)
    }))
}

fn matrix_power(m: &CoinMatrix, mut exp: usize) -> CoinMatrix {
    let mut result = CoinMatrix::identity();
    let mut base = *m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = base.mul(&result);
        }
        base = base.mul(&base);
        exp >>= 1;
    }
    result
}

/// Forward transform of the initial state, per-momentum propagation, inverse transform.
fn transform_evolve<F>(steps: usize, k_points: usize, propagate: F) -> WalkerState
where
    F: Fn(f64, [Complex64; 2]) -> [Complex64; 2],
{
    let zero = Complex64::new(0.0, 0.0);
    let initial = WalkerState::initial().amplitudes()[0];
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(k_points);
    let inverse = planner.plan_fft_inverse(k_points);

    // Site n lives at index n mod K.
    let mut comps = [vec![zero; k_points], vec![zero; k_points]];
    for (c, buf) in comps.iter_mut().enumerate() {
        buf[0] = initial[c];
        forward.process(buf);
    }

    for j in 0..k_points {
        let k = TAU * j as f64 / k_points as f64;
        let out = propagate(k, [comps[0][j], comps[1][j]]);
        comps[0][j] = out[0];
        comps[1][j] = out[1];
    }

    let scale = 1.0 / k_points as f64;
    for buf in comps.iter_mut() {
        inverse.process(buf);
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    let t = steps as i64;
    let amps = (-t..=t)
        .map(|n| {
            let idx = n.rem_euclid(k_points as i64) as usize;
            [comps[0][idx], comps[1][idx]]
        })
        .collect();
    WalkerState::from_amplitudes(steps, amps)
}
