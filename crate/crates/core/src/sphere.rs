//! Points on the unit (Bloch) sphere.

use serde::{Deserialize, Serialize};

use crate::coin::{wrap_azimuth, CoinParams};

/// A unit vector in Cartesian form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    pub const MEAN_DIRECTION: SpherePoint = SpherePoint {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    /// Builds a point from the polar angle about the z-axis given as
    /// `(sin, cos)`, plus the azimuth.
    pub(crate) fn from_polar_parts(sin_theta: f64, cos_theta: f64, phi: f64) -> Self {
        let (sp, cp) = phi.sin_cos();
        Self {
            x: sin_theta * cp,
            y: sin_theta * sp,
            z: cos_theta,
        }
    }

    /// Rotation about y by +pi/2, taking the z-axis onto the x-axis.
    pub fn rotate_z_to_x(self) -> Self {
        Self {
            x: self.z,
            y: self.y,
            z: -self.x,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Great-circle distance, computed with `atan2` so it stays accurate near 0 and pi.
    pub fn geodesic_distance(&self, other: &SpherePoint) -> f64 {
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        (cx * cx + cy * cy + cz * cz).sqrt().atan2(self.dot(other))
    }

    /// Polar angles `(theta, phi)` with `phi` in `[0, 2pi)`.
    pub fn polar(&self) -> (f64, f64) {
        let rho = (self.x * self.x + self.y * self.y).sqrt();
        (rho.atan2(self.z), wrap_azimuth(self.y.atan2(self.x)))
    }

    pub fn to_coin(self) -> CoinParams {
        let (theta, phi) = self.polar();
        CoinParams::new(theta, phi).expect("polar angles of a unit vector are in range")
    }
}
