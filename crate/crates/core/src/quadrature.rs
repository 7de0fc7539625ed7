//! Adaptive Simpson quadrature.

use std::f64::consts::PI;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64
where
    F: Fn(f64) -> f64,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // Once the correction is at roundoff level, further halving cannot help.
    let roundoff = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0
        || !delta.is_finite()
        || delta.abs() <= 15.0 * tol
        || delta.abs() <= roundoff
        || m <= a
        || b <= m
    {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Number of dyadic panels; the innermost one is narrower than `1e-300`.
const POLAR_PANELS: usize = 1000;

/// Integrates over `[0, pi]` on dyadic panels `[pi 2^-(j+1), pi 2^-j]`.
///
/// Concentrated spherical densities put almost all their mass within a tiny
/// angle of the pole; the geometric panels resolve that scale before the
/// adaptive refinement starts.
pub fn integrate_polar<F>(f: F, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    integrate_dyadic(&f, PI, tol)
}

/// Integrates over `[0, pi]` split at `pi/2`, with panels refined toward
/// both poles.
///
/// `north(theta)` covers `theta` in `[0, pi/2]`; `south(u)` covers the other
/// half in the reflected variable `u = pi - theta`, so integrands concentrated
/// within a few ulps of `pi` are still resolved.
pub fn integrate_polar_split<F, G>(north: F, south: G, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let half = 0.5 * PI;
    integrate_dyadic(&north, half, 0.5 * tol) + integrate_dyadic(&south, half, 0.5 * tol)
}

fn integrate_dyadic<F>(f: &F, length: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let panel_tol = tol / (POLAR_PANELS + 1) as f64;
    let mut edge = length * 0.5f64.powi(POLAR_PANELS as i32);
    let mut total = adaptive_simpson(f, 0.0, edge, panel_tol, DEFAULT_MAX_DEPTH);
    for _ in 0..POLAR_PANELS {
        let next = 2.0 * edge;
        total += adaptive_simpson(f, edge, next, panel_tol, DEFAULT_MAX_DEPTH);
        edge = next;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 20);
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn theta_squared_sine() {
        let v = integrate_polar(|x: f64| x * x * x.sin(), 1e-10);
        assert!((v - (PI * PI - 4.0)).abs() < 1e-9);
    }

    #[test]
    fn sharp_peak_near_pole() {
        // Normalized Lorentzian-like bump of width 1e-4 near zero.
        let w: f64 = 1e-4;
        let f = |x: f64| 2.0 * w * w * x / (w * w + x * x).powi(2);
        let exact = 1.0 - w * w / (w * w + PI * PI);
        let v = integrate_polar(f, 1e-10);
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
    }

    #[test]
    fn reflected_half_catches_peak_at_pi() {
        let w: f64 = 1e-60;
        let bump = |y: f64| 2.0 * w * w * y / (w * w + y * y).powi(2);
        let exact = 1.0 - w * w / (w * w + PI * PI);
        let v = integrate_polar_split(|x| bump(PI - x), bump, 1e-10);
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
    }
}
