//! Spherical disorder distributions for the coin.
//!
//! Every distribution is axially symmetric about its mean direction, which is
//! fixed at `(1, 0, 0)`: the Hadamard point `(theta, phi) = (pi/2, 0)`.
//! Sampling draws a polar angle about the z-axis by inverting its CDF, draws
//! the azimuth uniformly, then rotates the z-axis onto the x-axis. Exactly two
//! uniforms are consumed per sample, whatever the distribution.
//!
//! Internally the polar angle is carried as `w = 1 - cos(theta)`, which keeps
//! full relative precision for strongly concentrated distributions.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coin::CoinParams;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_polar_split, DEFAULT_TOLERANCE};
use crate::sphere::SpherePoint;

/// One of the five disorder families, without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderKind {
    Uniform,
    Vmf,
    Circular,
    Cl1,
    Cl2,
}

impl DisorderKind {
    pub const ALL: [DisorderKind; 5] = [
        DisorderKind::Uniform,
        DisorderKind::Vmf,
        DisorderKind::Circular,
        DisorderKind::Cl1,
        DisorderKind::Cl2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DisorderKind::Uniform => "uniform",
            DisorderKind::Vmf => "vmf",
            DisorderKind::Circular => "circular",
            DisorderKind::Cl1 => "cl1",
            DisorderKind::Cl2 => "cl2",
        }
    }

    /// Name of the distribution parameter as used in configs and flags.
    pub fn param_name(self) -> &'static str {
        match self {
            DisorderKind::Uniform => "r",
            DisorderKind::Vmf => "kappa",
            DisorderKind::Circular => "d",
            DisorderKind::Cl1 => "delta",
            DisorderKind::Cl2 => "rho",
        }
    }

    /// Builds a validated spec of this kind.
    pub fn with_param(self, value: f64) -> Result<DisorderSpec> {
        match self {
            DisorderKind::Uniform => DisorderSpec::uniform_cap(value),
            DisorderKind::Vmf => DisorderSpec::von_mises_fisher(value),
            DisorderKind::Circular => DisorderSpec::circular(value),
            DisorderKind::Cl1 => DisorderSpec::cauchy_lorentz_1(value),
            DisorderKind::Cl2 => DisorderSpec::cauchy_lorentz_2(value),
        }
    }
}

impl fmt::Display for DisorderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DisorderKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "uniform_cap" => Ok(DisorderKind::Uniform),
            "vmf" | "von_mises_fisher" | "normal" => Ok(DisorderKind::Vmf),
            "circular" => Ok(DisorderKind::Circular),
            "cl1" | "cauchy_lorentz_1" => Ok(DisorderKind::Cl1),
            "cl2" | "cauchy_lorentz_2" => Ok(DisorderKind::Cl2),
            other => Err(format!(
                "unknown distribution `{other}` (expected uniform, vmf, circular, cl1, cl2)"
            )),
        }
    }
}

/// A disorder distribution together with its concentration or range parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisorderSpec {
    /// Haar-uniform on the cap within perpendicular depth `r` of the mean.
    Uniform { r: f64 },
    /// von Mises-Fisher with concentration `kappa`.
    Vmf { kappa: f64 },
    /// All mass on the circle at geodesic radius `d`.
    Circular { d: f64 },
    /// Spherical Cauchy-Lorentz I; concentrates on the antipode when `delta < 1`.
    Cl1 { delta: f64 },
    /// Spherical Cauchy-Lorentz II (wrapped Cauchy type).
    Cl2 { rho: f64 },
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}

impl DisorderSpec {
    pub fn uniform_cap(r: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&r) {
            return Err(invalid("r", r, "cap depth must lie in [0, 2]"));
        }
        Ok(Self::Uniform { r })
    }

    pub fn von_mises_fisher(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(invalid(
                "kappa",
                kappa,
                "concentration must be positive and finite",
            ));
        }
        Ok(Self::Vmf { kappa })
    }

    pub fn circular(d: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&d) {
            return Err(invalid("d", d, "geodesic radius must lie in [0, pi]"));
        }
        Ok(Self::Circular { d })
    }

    /// Circle given by its Euclidean radius `r` (distance from the mean axis),
    /// taking the branch nearer the mean: `d = asin(r)`.
    pub fn circular_from_radius(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(invalid("r", r, "circle radius must lie in [0, 1]"));
        }
        Self::circular(r.asin())
    }

    pub fn cauchy_lorentz_1(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) || delta == 1.0 {
            return Err(invalid(
                "delta",
                delta,
                "must be positive, finite and not 1",
            ));
        }
        if delta.ln().abs() > CL1_LOG_DELTA {
            return Err(invalid(
                "delta",
                delta,
                "|ln delta| above 300 is beyond double-precision resolution of the density",
            ));
        }
        Ok(Self::Cl1 { delta })
    }

    pub fn cauchy_lorentz_2(rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(invalid("rho", rho, "must lie in [0, 1)"));
        }
        Ok(Self::Cl2 { rho })
    }

    pub fn kind(&self) -> DisorderKind {
        match self {
            Self::Uniform { .. } => DisorderKind::Uniform,
            Self::Vmf { .. } => DisorderKind::Vmf,
            Self::Circular { .. } => DisorderKind::Circular,
            Self::Cl1 { .. } => DisorderKind::Cl1,
            Self::Cl2 { .. } => DisorderKind::Cl2,
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            Self::Uniform { r } => r,
            Self::Vmf { kappa } => kappa,
            Self::Circular { d } => d,
            Self::Cl1 { delta } => delta,
            Self::Cl2 { rho } => rho,
        }
    }

    /// Re-checks the parameter range, for specs built by deserialization.
    pub fn validate(&self) -> Result<()> {
        self.kind().with_param(self.param()).map(|_| ())
    }

    /// `1 - cos(theta)` of the polar angle about the mean at CDF level `xi`.
    fn inverse_cdf_w(&self, xi: f64) -> f64 {
        match *self {
            Self::Uniform { r } => r * xi,
            Self::Vmf { kappa } => -(xi * (-2.0 * kappa).exp_m1()).ln_1p() / kappa,
            Self::Circular { d } => {
                let s = (0.5 * d).sin();
                2.0 * s * s
            }
            Self::Cl1 { delta } => {
                // 1 - cos = 2 (delta^{2 xi} - 1) / (delta^2 - 1)
                let l = delta.ln();
                if l > 0.0 {
                    2.0 * (2.0 * l * (xi - 1.0)).exp() * (-2.0 * l * xi).exp_m1()
                        / (-2.0 * l).exp_m1()
                } else {
                    2.0 * (2.0 * l * xi).exp_m1() / (2.0 * l).exp_m1()
                }
            }
            Self::Cl2 { rho } => {
                let up = 1.0 - rho;
                let dn = 1.0 + rho;
                2.0 * up * up * xi / (dn * dn - 4.0 * rho * xi)
            }
        }
        .clamp(0.0, 2.0)
    }

    /// Draws a point from the distribution, using exactly two uniforms.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SpherePoint {
        let xi_polar: f64 = rng.gen();
        let xi_azimuth: f64 = rng.gen();
        let w = self.inverse_cdf_w(xi_polar);
        let cos_t = 1.0 - w;
        let sin_t = (w * (2.0 - w)).max(0.0).sqrt();
        SpherePoint::from_polar_parts(sin_t, cos_t, TAU * xi_azimuth).rotate_z_to_x()
    }

    /// Draws the coin for one step.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CoinParams {
        self.sample_point(rng).to_coin()
    }

    /// Normalized marginal density of the polar angle about the mean direction.
    pub fn pdf_polar(&self, theta: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&theta) {
            return Err(invalid("theta", theta, "polar angle must lie in [0, pi]"));
        }
        match *self {
            Self::Circular { .. } => return Err(Error::SingularDensity("circular")),
            Self::Uniform { r: 0.0 } => {
                return Err(Error::SingularDensity("zero-width uniform cap"))
            }
            _ => {}
        }
        Ok(self.density_from_pole(theta, false))
    }

    /// Polar density at angle `angle` from the mean (`from_south = false`) or
    /// from the antipode (`from_south = true`). Measuring from the nearer pole
    /// keeps `1 - cos` and `1 + cos` exact near both ends.
    fn density_from_pole(&self, angle: f64, from_south: bool) -> f64 {
        let sin_t = angle.sin();
        if sin_t <= 0.0 {
            return 0.0;
        }
        let (sh, ch) = (0.5 * angle).sin_cos();
        let (near, far) = (2.0 * sh * sh, 2.0 * ch * ch);
        // w = 1 - cos(theta), v = 1 + cos(theta)
        let (w, v) = if from_south { (far, near) } else { (near, far) };
        match *self {
            Self::Uniform { r } => {
                if r > 0.0 && w <= r {
                    sin_t / r
                } else {
                    0.0
                }
            }
            Self::Vmf { kappa } => kappa / -(-2.0 * kappa).exp_m1() * (-kappa * w).exp() * sin_t,
            Self::Circular { .. } => 0.0,
            Self::Cl1 { delta } => {
                let l = delta.ln();
                if l > 0.0 {
                    let q = (-2.0 * l).exp();
                    -(-2.0 * l).exp_m1() * sin_t / (2.0 * l * (w + q * v))
                } else {
                    let q = (2.0 * l).exp();
                    (2.0 * l).exp_m1() * sin_t / (2.0 * l * (q * w + v))
                }
            }
            Self::Cl2 { rho } => {
                let one_minus = 1.0 - rho * rho;
                let den = (1.0 - rho) * (1.0 - rho) + 2.0 * rho * w;
                0.5 * one_minus * one_minus * sin_t / (den * den)
            }
        }
    }

    /// `integral of g(theta) pdf(theta)` over `[0, pi]`.
    pub(crate) fn polar_expectation<G: Fn(f64) -> f64>(&self, g: G, tol: f64) -> f64 {
        integrate_polar_split(
            |theta| g(theta) * self.density_from_pole(theta, false),
            |u| g(PI - u) * self.density_from_pole(u, true),
            tol,
        )
    }
}

impl fmt::Display for DisorderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}={})",
            self.kind(),
            self.kind().param_name(),
            self.param()
        )
    }
}

/// How a disorder strength was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrengthRoute {
    ClosedForm,
    Quadrature,
}

impl fmt::Display for StrengthRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrengthRoute::ClosedForm => f.write_str("closed form"),
            StrengthRoute::Quadrature => f.write_str("adaptive Simpson quadrature"),
        }
    }
}

/// Disorder strength: root-mean-square geodesic distance from `(1, 0, 0)`.
pub fn sigma_dis(spec: &DisorderSpec) -> f64 {
    sigma_dis_with_route(spec).0
}

pub fn sigma_dis_with_route(spec: &DisorderSpec) -> (f64, StrengthRoute) {
    match *spec {
        DisorderSpec::Uniform { r } => (uniform_cap_sigma(r), StrengthRoute::ClosedForm),
        DisorderSpec::Circular { d } => (d, StrengthRoute::ClosedForm),
        _ => {
            let second_moment = spec.polar_expectation(|theta| theta * theta, DEFAULT_TOLERANCE);
            (second_moment.max(0.0).sqrt(), StrengthRoute::Quadrature)
        }
    }
}

/// `sqrt((1/r) [u th^2 - 2 sqrt(1-u^2) th - 2u]_{u=1-r}^{u=1})`, `th = acos(u)`.
fn uniform_cap_sigma(r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let antiderivative = |u: f64| {
        let th = u.clamp(-1.0, 1.0).acos();
        u * th * th - 2.0 * (1.0 - u * u).max(0.0).sqrt() * th - 2.0 * u
    };
    ((antiderivative(1.0) - antiderivative(1.0 - r)) / r)
        .max(0.0)
        .sqrt()
}

/// `sqrt((pi^2 - 4) / 2)`, the strength of the Haar-uniform distribution on the full sphere.
pub fn full_sphere_sigma() -> f64 {
    (0.5 * (PI * PI - 4.0)).sqrt()
}

/// Achievable strength range of a family, as used by [`strength_to_param`].
pub fn strength_range(kind: DisorderKind) -> (f64, f64) {
    match kind {
        DisorderKind::Uniform => (0.0, uniform_cap_sigma(2.0)),
        DisorderKind::Circular => (0.0, PI),
        DisorderKind::Vmf => (
            sigma_dis(&DisorderSpec::Vmf {
                kappa: VMF_LOG_KAPPA.1.exp(),
            }),
            sigma_dis(&DisorderSpec::Vmf {
                kappa: VMF_LOG_KAPPA.0.exp(),
            }),
        ),
        DisorderKind::Cl1 => (
            sigma_dis(&DisorderSpec::Cl1 {
                delta: CL1_LOG_DELTA.exp(),
            }),
            sigma_dis(&DisorderSpec::Cl1 {
                delta: (-CL1_LOG_DELTA).exp(),
            }),
        ),
        DisorderKind::Cl2 => (
            sigma_dis(&cl2_from_log_gap(CL2_LOG_GAP_MAX)),
            full_sphere_sigma(),
        ),
    }
}

const VMF_LOG_KAPPA: (f64, f64) = (-16.0, 28.0);
/// Beyond `|ln delta| = 300` the regularizing term `delta^-2` of the density
/// underflows and the polar marginal stops being integrable.
const CL1_LOG_DELTA: f64 = 300.0;
/// `rho = 1 - e^{-30}`.
const CL2_LOG_GAP_MAX: f64 = 30.0;

fn cl2_from_log_gap(s: f64) -> DisorderSpec {
    DisorderSpec::Cl2 {
        rho: -(-s).exp_m1(),
    }
}

/// Finds the parameter of `kind` whose strength equals `target`.
pub fn strength_to_param(kind: DisorderKind, target: f64) -> Result<DisorderSpec> {
    let (min, max) = strength_range(kind);
    if !(target >= min && target <= max) {
        // Also rejects NaN.
        return Err(Error::StrengthOutOfRange {
            kind: kind.name(),
            target,
            min,
            max,
        });
    }
    let spec = match kind {
        DisorderKind::Circular => DisorderSpec::Circular { d: target },
        DisorderKind::Uniform => {
            let r = bisect(0.0, 2.0, true, target, uniform_cap_sigma);
            DisorderSpec::Uniform { r }
        }
        DisorderKind::Vmf => {
            let l = bisect(VMF_LOG_KAPPA.0, VMF_LOG_KAPPA.1, false, target, |l| {
                sigma_dis(&DisorderSpec::Vmf { kappa: l.exp() })
            });
            DisorderSpec::Vmf { kappa: l.exp() }
        }
        DisorderKind::Cl1 => {
            let cl1 = |l: f64| {
                let delta = l.exp();
                DisorderSpec::Cl1 {
                    delta: if delta == 1.0 { 1.0 + 1e-12 } else { delta },
                }
            };
            let l = bisect(-CL1_LOG_DELTA, CL1_LOG_DELTA, false, target, |l| {
                sigma_dis(&cl1(l))
            });
            cl1(l)
        }
        DisorderKind::Cl2 => {
            if target == max {
                DisorderSpec::Cl2 { rho: 0.0 }
            } else {
                let s = bisect(0.0, CL2_LOG_GAP_MAX, false, target, |s| {
                    sigma_dis(&cl2_from_log_gap(s))
                });
                cl2_from_log_gap(s)
            }
        }
    };
    Ok(spec)
}

/// Bisection on a monotone function; `increasing` gives its direction.
fn bisect<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, increasing: bool, target: f64, f: F) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = f(mid);
        if (value - target).abs() < 1e-10 {
            return mid;
        }
        if (value < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
