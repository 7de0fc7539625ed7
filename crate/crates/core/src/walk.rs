//! Position-space evolution of the coin (x) position state.
//!
//! Amplitudes are stored densely over the light cone `[-t, t]`. Each lattice
//! entry holds the pair `[psi_0, psi_1]`, the amplitudes with the coin in `|0>`
//! and `|1>`. A step applies the coin at every site, then moves the `|0>`
//! component one site right and the `|1>` component one site left.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::coin::{biased_hadamard, CoinMatrix, CoinParams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Joint coin and position state after `t` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    t: usize,
    /// `amps[n + t] = [psi_0(n), psi_1(n)]`.
    amps: Vec<[Complex64; 2]>,
}

impl WalkerState {
    /// Builds a state from its light-cone amplitudes; `amps.len()` must be `2t + 1`.
    pub fn from_amplitudes(t: usize, amps: Vec<[Complex64; 2]>) -> Self {
        assert_eq!(amps.len(), 2 * t + 1, "amplitude array must cover [-t, t]");
        Self { t, amps }
    }

    /// `(|0> + i|1>)/sqrt(2)` at the origin.
    pub fn initial() -> Self {
        Self {
            t: 0,
            amps: vec![[
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(0.0, FRAC_1_SQRT_2),
            ]],
        }
    }

    pub fn steps(&self) -> usize {
        self.t
    }

    pub fn amplitudes(&self) -> &[[Complex64; 2]] {
        &self.amps
    }

    /// Amplitude pair at `site`, zero outside the light cone.
    pub fn at(&self, site: i64) -> [Complex64; 2] {
        let t = self.t as i64;
        if site < -t || site > t {
            return [ZERO, ZERO];
        }
        self.amps[(site + t) as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    /// Reduced coin state `rho_c` (traced over position), row-major in the `|0>,|1>` basis.
    pub fn coin_density(&self) -> [[Complex64; 2]; 2] {
        let mut rho = [[ZERO; 2]; 2];
        for a in &self.amps {
            for i in 0..2 {
                for j in 0..2 {
                    rho[i][j] += a[i] * a[j].conj();
                }
            }
        }
        rho
    }

    /// Largest entrywise amplitude difference from `other`, which must have the same `t`.
    pub fn max_abs_diff(&self, other: &WalkerState) -> f64 {
        assert_eq!(self.t, other.t);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a[0] - b[0]).norm().max((a[1] - b[1]).norm()))
            .fold(0.0, f64::max)
    }
}

pub fn initial_state() -> WalkerState {
    WalkerState::initial()
}

/// One coin toss followed by the conditional shift.
pub fn step(s: &WalkerState, m: &CoinMatrix) -> WalkerState {
    let mut next = vec![[ZERO, ZERO]; s.amps.len() + 2];
    // Old index j (site j - t) feeds new index j + 2 (site + 1) and j (site - 1).
    for (j, a) in s.amps.iter().enumerate() {
        let c = m.apply(*a);
        next[j + 2][0] += c[0];
        next[j][1] += c[1];
    }
    WalkerState {
        t: s.t + 1,
        amps: next,
    }
}

/// Advances the initial state once per coin in `config`, in order.
pub fn evolve(config: &[CoinParams]) -> WalkerState {
    let coins: Vec<CoinMatrix> = config.iter().map(|&p| biased_hadamard(p)).collect();
    evolve_matrices(&coins)
}

/// Same as [`evolve`] with precomputed coin matrices.
///
/// Both buffers span the final light cone so nothing is reallocated per step.
pub fn evolve_matrices(coins: &[CoinMatrix]) -> WalkerState {
    let total = coins.len();
    let width = 2 * total + 1;
    let mut cur = vec![[ZERO, ZERO]; width];
    let mut next = vec![[ZERO, ZERO]; width];
    cur[total] = WalkerState::initial().amps[0];

    for (t, m) in coins.iter().enumerate() {
        // Live window of the current state is [total - t, total + t].
        let lo = total - t;
        let hi = total + t;
        for slot in &mut next[lo.saturating_sub(1)..=(hi + 1).min(width - 1)] {
            *slot = [ZERO, ZERO];
        }
        for j in lo..=hi {
            let c = m.apply(cur[j]);
            next[j + 1][0] += c[0];
            next[j - 1][1] += c[1];
        }
        std::mem::swap(&mut cur, &mut next);
    }
    WalkerState {
        t: total,
        amps: cur,
    }
}

/// Probability of finding the walker at each site of `[-t, t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    min_site: i64,
    probs: Vec<f64>,
}

impl PositionDistribution {
    pub fn new(min_site: i64, probs: Vec<f64>) -> Self {
        Self { min_site, probs }
    }

    pub fn min_site(&self) -> i64 {
        self.min_site
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, site: i64) -> f64 {
        let idx = site - self.min_site;
        if idx < 0 {
            return 0.0;
        }
        self.probs.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.min_site + i as i64, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Traces out the coin.
pub fn position_distribution(s: &WalkerState) -> PositionDistribution {
    PositionDistribution {
        min_site: -(s.t as i64),
        probs: s
            .amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .collect(),
    }
}

/// `sqrt(sum n^2 p_n - (sum n p_n)^2)`.
pub fn position_std(d: &PositionDistribution) -> f64 {
    let (mut first, mut second) = (0.0, 0.0);
    for (n, p) in d.iter() {
        let n = n as f64;
        first += n * p;
        second += n * n * p;
    }
    (second - first * first).max(0.0).sqrt()
}

/// Position distribution of the symmetric classical random walk after `t` steps.
pub fn classical_distribution(t: usize) -> PositionDistribution {
    let mut probs = vec![0.0; 2 * t + 1];
    // p_k = C(t, k) / 2^t for k rightward moves, landing on site 2k - t.
    let mut p = 0.5f64.powi(t as i32);
    for k in 0..=t {
        probs[2 * k] = p;
        p *= (t - k) as f64 / (k + 1) as f64;
    }
    PositionDistribution {
        min_site: -(t as i64),
        probs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn hadamard() -> CoinMatrix {
        biased_hadamard(CoinParams::hadamard())
    }

    #[test]
    fn initial_state_is_normalized_at_origin() {
        let s = initial_state();
        assert!((s.norm_sqr() - 1.0).abs() <= f64::EPSILON);
        let d = position_distribution(&s);
        assert_eq!(d.probs().len(), 1);
        assert!((d.prob(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_coin_points_along_plus_y() {
        // <sigma_y> = 2 Im(rho_10).
        let rho = initial_state().coin_density();
        let sy = 2.0 * rho[1][0].im;
        assert!((sy - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_hadamard_step_splits_evenly() {
        let s = step(&initial_state(), &hadamard());
        let d = position_distribution(&s);
        assert!((d.prob(1) - 0.5).abs() < 1e-15);
        assert!((d.prob(-1) - 0.5).abs() < 1e-15);
        assert_eq!(d.prob(0), 0.0);
        assert!((position_std(&d) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_coin_moves_zero_component_right() {
        let s = WalkerState::from_amplitudes(0, vec![[Complex64::new(1.0, 0.0), ZERO]]);
        let d = position_distribution(&step(&s, &CoinMatrix::identity()));
        assert_eq!(d.prob(1), 1.0);
        assert_eq!(d.prob(-1), 0.0);
    }

    #[test]
    fn two_steps_stay_on_even_sites() {
        let s = step(&step(&initial_state(), &hadamard()), &hadamard());
        let d = position_distribution(&s);
        for (n, p) in d.iter() {
            if n % 2 != 0 {
                assert_eq!(p, 0.0, "site {n}");
            }
        }
    }

    #[test]
    fn pauli_z_coin_is_ballistic() {
        let config = vec![CoinParams::new(0.0, 0.0).unwrap(); 8];
        let d = position_distribution(&evolve(&config));
        assert!((d.prob(8) - 0.5).abs() < 1e-15);
        assert!((d.prob(-8) - 0.5).abs() < 1e-15);
        assert!((position_std(&d) - 8.0).abs() < 1e-13);
    }

    #[test]
    fn evolve_matches_repeated_step() {
        let config: Vec<CoinParams> = (0..12)
            .map(|i| CoinParams::new(0.2 + 0.2 * i as f64, 0.5 * i as f64).unwrap())
            .collect();
        let mut s = initial_state();
        for &p in &config {
            s = step(&s, &biased_hadamard(p));
        }
        assert!(evolve(&config).max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn ordered_walk_spread_ratio_at_24() {
        let config = vec![CoinParams::hadamard(); 24];
        let sigma = position_std(&position_distribution(&evolve(&config)));
        let ratio = sigma / 24.0;
        assert!((0.52..=0.56).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn classical_spread_is_sqrt_t() {
        for t in [1usize, 2, 8, 17, 24, 100] {
            let d = classical_distribution(t);
            assert!((d.total() - 1.0).abs() < 1e-12);
            assert!((position_std(&d) - (t as f64).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn two_point_distribution_std() {
        let d = PositionDistribution::new(-1, vec![0.5, 0.0, 0.5]);
        assert_eq!(position_std(&d), 1.0);
    }

    #[test]
    fn any_single_step_has_unit_spread() {
        for &(theta, phi) in &[(0.3, 0.0), (FRAC_PI_2, 1.0), (PI, 4.0), (2.0, 5.5)] {
            let s = evolve(&[CoinParams::new(theta, phi).unwrap()]);
            let sigma = position_std(&position_distribution(&s));
            assert!((sigma - 1.0).abs() < 1e-14);
        }
    }
}
