//! Integral identities relating the kernels, evaluated by quadrature of the
//! kernel evaluators themselves.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::kernels::{poisson_1d, poisson_halfspace, potential_m, HalfSpacePoint, ProcessParams};
use crate::quadrature::{
    integrate_power_singular, integrate_semi_infinite_scaled, HalfLine, QuadSpec,
};

fn identity_quad() -> QuadSpec {
    QuadSpec::relative(1e-11)
}

fn require_line(p: &ProcessParams) -> Result<()> {
    if p.d() != 1 {
        return domain(format!(
            "one-dimensional identity called with d = {}",
            p.d()
        ));
    }
    Ok(())
}

// exponent of the potential singularity at the origin in d = 1: U(s) ~ s^{beta-1}
fn potential_beta(alpha: f64) -> f64 {
    if alpha < 1.0 {
        alpha
    } else {
        // logarithmic at alpha = 1, bounded with a cusp above
        0.5
    }
}

/// `int_{-inf}^0 P(x, u) U(u - y) du` for `y < 0 < x` in `d = 1`, where `U` is
/// the `m`-potential. The integrand is singular at `u = y` and `u = 0`.
pub fn sweep_integral(x: f64, y: f64, p: &ProcessParams) -> Result<f64> {
    require_line(p)?;
    if !(x > 0.0 && y < 0.0) {
        return domain(format!("sweep needs y < 0 < x, got x = {x}, y = {y}"));
    }
    let spec = identity_quad();
    let a = p.alpha();
    let kappa = p.kappa();
    let beta_u = potential_beta(a);
    let u_pot = |s: f64| potential_m(&[s], p).unwrap_or(f64::NAN);
    let pk = |u: f64| poisson_1d(x, u, p).unwrap_or(f64::NAN);
    let singular_u = |s: f64| u_pot(s) * s.powf(1.0 - beta_u);
    // (-inf, y] in s = y - u, with lengths measured in units of 1 / kappa
    let left = integrate_power_singular(
        |sig: f64| {
            let s = sig / kappa;
            pk(y - s) * singular_u(s) / kappa.powf(beta_u)
        },
        beta_u,
        f64::INFINITY,
        &spec,
    )?;
    let half = -0.5 * y;
    // [y, y/2] in s = u - y
    let middle = integrate_power_singular(|s: f64| pk(y + s) * singular_u(s), beta_u, half, &spec)?;
    // [y/2, 0] in s = -u, where P ~ s^{-a/2}
    let beta_p = 1.0 - 0.5 * a;
    let right = integrate_power_singular(
        |s: f64| pk(-s) * s.powf(0.5 * a) * u_pot(-s - y),
        beta_p,
        half,
        &spec,
    )?;
    Ok(left + middle + right)
}

/// `U(x - y) - int_{-inf}^0 P(x, u) U(u - y) du` for `x, y > 0` in `d = 1`;
/// equals the Green function of the half-line.
pub fn green_compensator(x: f64, y: f64, p: &ProcessParams) -> Result<f64> {
    require_line(p)?;
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("compensator needs x, y > 0, got x = {x}, y = {y}"));
    }
    let a = p.alpha();
    let kappa = p.kappa();
    let beta = 1.0 - 0.5 * a;
    let swept = integrate_power_singular(
        |sig: f64| {
            let s = sig / kappa;
            let pk = poisson_1d(x, -s, p).unwrap_or(f64::NAN);
            let u = potential_m(&[-s - y], p).unwrap_or(f64::NAN);
            pk * s.powf(0.5 * a) * u / kappa.powf(beta)
        },
        beta,
        f64::INFINITY,
        &identity_quad(),
    )?;
    Ok(potential_m(&[x - y], p)? - swept)
}

/// `int_{u_d < 0} P(x, u) du`. In `d = 1` the kernel is integrated directly;
/// for `d` in `{2, 3}` the horizontal integral is reduced to one over the
/// radius `rho = |u_bar - x_bar|`.
pub fn poisson_mass(x: &HalfSpacePoint, p: &ProcessParams) -> Result<f64> {
    let xd = x.boundary_distance();
    if !(xd > 0.0) || x.dim() != p.d() {
        return domain("poisson_mass needs an interior point of dimension d");
    }
    let a = p.alpha();
    let kappa = p.kappa();
    let beta = 1.0 - 0.5 * a;
    let spec = identity_quad();
    let d = p.d();
    if d > 3 {
        return domain(format!("poisson_mass supports d <= 3, got {d}"));
    }
    // profile in the depth w = -u_d; equals P(x, -w) for d = 1
    let depth = |w: f64| -> f64 {
        if d == 1 {
            return poisson_1d(xd, -w, p).unwrap_or(f64::NAN);
        }
        let width = (1.0f64).max((kappa * (xd + w)).sqrt()) / kappa;
        let surface = match d {
            2 => 2.0,
            _ => 2.0 * PI,
        };
        let radial = |rho: f64| {
            let mut coords = vec![0.0; d];
            coords[0] = rho;
            coords[d - 1] = -w;
            let u = HalfSpacePoint::new(coords).expect("finite coordinates");
            let xp = HalfSpacePoint::on_axis(d, xd).expect("finite coordinates");
            surface * rho.powi(d as i32 - 2) * poisson_halfspace(&xp, &u, p).unwrap_or(f64::NAN)
        };
        integrate_semi_infinite_scaled(radial, HalfLine::Above(0.0), width, &spec)
            .unwrap_or(f64::NAN)
    };
    // w = sigma / kappa gives unit decay in sigma
    integrate_power_singular(
        |sig: f64| {
            let w = sig / kappa;
            depth(w) * w.powf(0.5 * a) / kappa.powf(beta)
        },
        beta,
        f64::INFINITY,
        &spec,
    )
}
