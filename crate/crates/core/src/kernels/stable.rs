//! The `m -> 0` limits of the half-space Green function and Poisson
//! kernel, which are the corresponding objects for the isotropic
//! alpha-stable process.

use std::f64::consts::PI;

use super::{
    green_halfspace, kernel_quad, poisson_constant, poisson_halfspace, HalfSpacePoint,
    ProcessParams,
};
use crate::error::{domain, Result};
use crate::quadrature::integrate_power_singular;
use crate::specfun::ln_gamma;

/// Masses used for the extrapolation `m -> 0`.
pub const STABLE_LIMIT_MASSES: [f64; 3] = [1e-3, 1e-4, 1e-5];

fn interior_pair(x: &HalfSpacePoint, y: &HalfSpacePoint) -> Result<(f64, f64)> {
    if x.dim() != y.dim() {
        return domain("points of different dimension");
    }
    let (xd, yd) = (x.boundary_distance(), y.boundary_distance());
    if !(xd > 0.0 && yd > 0.0) {
        return domain("interior points required");
    }
    Ok((xd, yd))
}

/// `|x-y|^{a-d} int_0^{4 x_d y_d / |x-y|^2} t^{a/2-1} (t+1)^{-d/2} dt`,
/// the shape of the stable Green function of the half-space.
pub fn stable_green_shape(x: &HalfSpacePoint, y: &HalfSpacePoint, alpha: f64) -> Result<f64> {
    let (xd, yd) = interior_pair(x, y)?;
    let dim = x.dim() as f64;
    let delta = x.distance(y);
    if delta == 0.0 {
        return domain("stable_green_shape is singular on the diagonal");
    }
    let upper = 4.0 * xd * yd / (delta * delta);
    let integral = integrate_power_singular(
        |t: f64| (t + 1.0).powf(-0.5 * dim),
        0.5 * alpha,
        upper,
        &kernel_quad(),
    )?;
    Ok(delta.powf(alpha - dim) * integral)
}

/// The constant in front of [`stable_green_shape`] obtained from the small
/// argument asymptotics of `K_{d/2}`: `Gamma(d/2) / (2^a pi^{d/2} Gamma(a/2)^2)`.
pub fn stable_green_constant(alpha: f64, d: usize) -> f64 {
    let dim = d as f64;
    (ln_gamma(dim / 2.0) - 2.0 * ln_gamma(alpha / 2.0)).exp()
        / (2f64.powf(alpha) * PI.powf(dim / 2.0))
}

/// `(x_d / -u_d)^{a/2} |x-u|^{-d}`, the shape of the stable Poisson kernel.
pub fn stable_poisson_shape(x: &HalfSpacePoint, u: &HalfSpacePoint, alpha: f64) -> Result<f64> {
    if x.dim() != u.dim() {
        return domain("points of different dimension");
    }
    let (xd, ud) = (x.boundary_distance(), u.boundary_distance());
    if !(xd > 0.0 && ud < 0.0) {
        return domain("stable_poisson_shape needs u_d < 0 < x_d");
    }
    Ok((xd / -ud).powf(alpha / 2.0) * x.distance(u).powi(-(x.dim() as i32)))
}

/// `sin(pi a/2) Gamma(d/2) / pi^{1+d/2}`, the constant in front of
/// [`stable_poisson_shape`].
pub fn stable_poisson_constant(alpha: f64, d: usize) -> f64 {
    let dim = d as f64;
    poisson_constant(alpha) * ln_gamma(dim / 2.0).exp() / PI.powf(dim / 2.0)
}

// Value at h = 0 of the interpolating polynomial through (h_i, f_i).
fn extrapolate_to_zero(h: &[f64], f: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..h.len() {
        let mut weight = 1.0;
        for j in 0..h.len() {
            if j != i {
                weight *= h[j] / (h[j] - h[i]);
            }
        }
        total += weight * f[i];
    }
    total
}

fn extrapolate<F: Fn(&ProcessParams) -> Result<f64>>(alpha: f64, d: usize, eval: F) -> Result<f64> {
    let mut h = Vec::with_capacity(STABLE_LIMIT_MASSES.len());
    let mut f = Vec::with_capacity(STABLE_LIMIT_MASSES.len());
    for &m in &STABLE_LIMIT_MASSES {
        let p = ProcessParams::new(alpha, m, d)?;
        h.push(p.kappa());
        f.push(eval(&p)?);
    }
    Ok(extrapolate_to_zero(&h, &f))
}

/// `lim_{m -> 0} G^m_H(x, y)` by polynomial extrapolation in `m^{1/a}` over
/// [`STABLE_LIMIT_MASSES`].
pub fn stable_limit_green(
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    alpha: f64,
    d: usize,
) -> Result<f64> {
    interior_pair(x, y)?;
    extrapolate(alpha, d, |p| green_halfspace(x, y, p))
}

/// `lim_{m -> 0} P^m_H(x, u)` by the same extrapolation.
pub fn stable_limit_poisson(
    x: &HalfSpacePoint,
    u: &HalfSpacePoint,
    alpha: f64,
    d: usize,
) -> Result<f64> {
    extrapolate(alpha, d, |p| poisson_halfspace(x, u, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> HalfSpacePoint {
        HalfSpacePoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn shape_closed_form() {
        let v = stable_green_shape(&pt(&[1.0]), &pt(&[2.0]), 1.0).unwrap();
        assert!((v - 3.525_494_348_078_172).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let h = [1e-3, 1e-4, 1e-5];
        let f: Vec<f64> = h.iter().map(|x| 2.0 + 3.0 * x - 7.0 * x * x).collect();
        assert!((extrapolate_to_zero(&h, &f) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn limits_match_analytic_constants() {
        let x = pt(&[0.3, 0.7]);
        let y = pt(&[-0.2, 1.1]);
        let u = pt(&[0.5, -0.4]);
        let g = stable_limit_green(&x, &y, 1.0, 2).unwrap();
        let want = stable_green_constant(1.0, 2) * stable_green_shape(&x, &y, 1.0).unwrap();
        assert!(((g - want) / want).abs() < 1e-6);
        let pk = stable_limit_poisson(&x, &u, 1.0, 2).unwrap();
        let want = stable_poisson_constant(1.0, 2) * stable_poisson_shape(&x, &u, 1.0).unwrap();
        assert!(((pk - want) / want).abs() < 1e-6);
    }

    #[test]
    fn poisson_shape_homogeneity() {
        let x = pt(&[0.0, 1.0]);
        let u = pt(&[0.5, -2.0]);
        let a = stable_poisson_shape(&x, &u, 0.7).unwrap();
        let b = stable_poisson_shape(&x.scaled(2.0), &u.scaled(2.0), 0.7).unwrap();
        assert!((a / b - 4.0).abs() < 1e-13);
    }
}
