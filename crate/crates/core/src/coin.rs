//! Biased Hadamard coins.
//!
//! A coin is parameterized by a point `(theta, phi)` on the Bloch sphere; the
//! gate maps `|0>` onto the state at that point and `|1>` onto its antipode.
//! Column 0 of a [`CoinMatrix`] is the image of `|0>`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polar and azimuthal angles of one coin on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinParams {
    theta: f64,
    phi: f64,
}

impl CoinParams {
    /// `theta` must lie in `[0, pi]`; `phi` is wrapped into `[0, 2pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                reason: "polar angle must lie in [0, pi]",
            });
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: phi,
                reason: "azimuth must be finite",
            });
        }
        Ok(Self {
            theta,
            phi: wrap_azimuth(phi),
        })
    }

    /// The disorder-free coin, i.e. the Hadamard gate.
    pub const fn hadamard() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Wraps into `[0, 2pi)`, folding `-0.0` onto `+0.0`.
pub(crate) fn wrap_azimuth(phi: f64) -> f64 {
    let wrapped = phi.rem_euclid(TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped + 0.0
    }
}

/// A 2x2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix(pub [[Complex64; 2]; 2]);

impl CoinMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self([[one, zero], [zero, one]])
    }

    #[inline]
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn mul(&self, other: &CoinMatrix) -> CoinMatrix {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        CoinMatrix(out)
    }

    pub fn adjoint(&self) -> CoinMatrix {
        let m = &self.0;
        CoinMatrix([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Largest entrywise deviation of `M^dagger M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.adjoint().mul(self);
        let id = CoinMatrix::identity();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((prod.0[i][j] - id.0[i][j]).norm());
            }
        }
        worst
    }
}

/// `H(theta, phi)` with rows `(cos, sin)` and `(sin e^{i phi}, -cos e^{i phi})`
/// of the half angle.
pub fn biased_hadamard(p: CoinParams) -> CoinMatrix {
    let (s, c) = (0.5 * p.theta).sin_cos();
    let phase = Complex64::from_polar(1.0, p.phi);
    CoinMatrix([
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [phase * s, -phase * c],
    ])
}
