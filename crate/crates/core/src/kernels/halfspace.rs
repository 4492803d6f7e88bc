//! Poisson kernels, Green functions and the discounted exit expectation of
//! the half-space `H = {x : x_d > 0}`.

use std::f64::consts::PI;

use super::{kernel_quad, positive_ln, HalfSpacePoint, ProcessParams};
use crate::error::{domain, Error, Result};
use crate::quadrature::integrate_power_singular;
use crate::specfun::{k_nu, k_nu_scaled, ln_gamma, ln_k_nu, upper_gamma_regularized};

// Below this separation the Green function is integrated in the `s` variable,
// whose range does not grow as the points merge.
const NEAR_DIAGONAL: f64 = 1e-3;

/// `sin(pi alpha / 2) / pi`, the constant of the Poisson kernels.
pub fn poisson_constant(alpha: f64) -> f64 {
    (PI * alpha / 2.0).sin() / PI
}

fn require_one_dim(p: &ProcessParams) -> Result<()> {
    if p.d() != 1 {
        return domain(format!("one-dimensional kernel called with d = {}", p.d()));
    }
    Ok(())
}

/// Log of the Poisson kernel of `(0, inf)`, `x > 0 > u`.
pub fn ln_poisson_1d(x: f64, u: f64, p: &ProcessParams) -> Result<f64> {
    require_one_dim(p)?;
    if !(x > 0.0 && u < 0.0 && x.is_finite() && u.is_finite()) {
        return domain(format!("poisson_1d needs u < 0 < x, got x = {x}, u = {u}"));
    }
    let a = p.alpha();
    Ok(poisson_constant(a).ln() + 0.5 * a * (x / -u).ln() - p.kappa() * (x - u) - (x - u).ln())
}

/// Poisson kernel of the half-line `(0, inf)`:
/// `(sin(pi a/2)/pi) (x/-u)^{a/2} e^{-kappa (x-u)} / (x-u)`.
pub fn poisson_1d(x: f64, u: f64, p: &ProcessParams) -> Result<f64> {
    ln_poisson_1d(x, u, p).map(f64::exp)
}

fn check_pair_dims(p: &ProcessParams, a: &HalfSpacePoint, b: &HalfSpacePoint) -> Result<()> {
    p.require_dim(a)?;
    p.require_dim(b)
}

/// Log of the Poisson kernel of the half-space.
pub fn ln_poisson_halfspace(
    x: &HalfSpacePoint,
    u: &HalfSpacePoint,
    p: &ProcessParams,
) -> Result<f64> {
    check_pair_dims(p, x, u)?;
    let (xd, ud) = (x.boundary_distance(), u.boundary_distance());
    if !(xd > 0.0 && ud < 0.0) {
        return domain(format!(
            "poisson_halfspace needs u_d < 0 < x_d, got x_d = {xd}, u_d = {ud}"
        ));
    }
    let half_d = p.d() as f64 / 2.0;
    let kappa = p.kappa();
    let r = x.distance(u);
    Ok((2.0 * poisson_constant(p.alpha())).ln()
        + half_d * (kappa / (2.0 * PI)).ln()
        + 0.5 * p.alpha() * (xd / -ud).ln()
        + ln_k_nu(half_d, kappa * r)
        - half_d * r.ln())
}

/// Poisson kernel of the half-space,
/// `2 C (kappa/2pi)^{d/2} (x_d/-u_d)^{a/2} K_{d/2}(kappa |x-u|) / |x-u|^{d/2}`.
pub fn poisson_halfspace(x: &HalfSpacePoint, u: &HalfSpacePoint, p: &ProcessParams) -> Result<f64> {
    ln_poisson_halfspace(x, u, p).map(f64::exp)
}

fn diagonal_check(delta: f64, p: &ProcessParams) -> Result<()> {
    if delta == 0.0 && p.alpha() <= p.d() as f64 {
        return Err(Error::Diagonal {
            alpha: p.alpha(),
            d: p.d(),
        });
    }
    Ok(())
}

/// Log of the Green function of `(0, inf)`.
pub fn ln_green_1d(x: f64, y: f64, p: &ProcessParams) -> Result<f64> {
    require_one_dim(p)?;
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return domain(format!("green_1d needs x, y > 0, got x = {x}, y = {y}"));
    }
    let a = p.alpha();
    let kappa = p.kappa();
    let delta = (x - y).abs();
    diagonal_check(delta, p)?;
    let upper = 4.0 * x * y;
    let spec = kernel_quad();
    let integral = if delta == 0.0 {
        integrate_power_singular(
            |u: f64| (-kappa * u.sqrt()).exp(),
            0.5 * (a - 1.0),
            upper,
            &spec,
        )?
    } else {
        let d2 = delta * delta;
        integrate_power_singular(
            |u: f64| {
                let r = (u + d2).sqrt();
                (-kappa * u / (r + delta)).exp() / r
            },
            0.5 * a,
            upper,
            &spec,
        )?
    };
    Ok(-a * 2f64.ln() - 2.0 * ln_gamma(0.5 * a) - kappa * delta
        + positive_ln(integral, "green_1d integral")?)
}

/// Green function of `(0, inf)`:
/// `(1/(2^a Gamma(a/2)^2)) int_0^{4xy} e^{-kappa sqrt(u+(x-y)^2)} u^{a/2-1} (u+(x-y)^2)^{-1/2} du`.
pub fn green_1d(x: f64, y: f64, p: &ProcessParams) -> Result<f64> {
    ln_green_1d(x, y, p).map(f64::exp)
}

/// Log of the Green function of the half-space.
pub fn ln_green_halfspace(
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    p: &ProcessParams,
) -> Result<f64> {
    check_pair_dims(p, x, y)?;
    let (xd, yd) = (x.boundary_distance(), y.boundary_distance());
    if !(xd > 0.0 && yd > 0.0) {
        return domain(format!(
            "green_halfspace needs x_d, y_d > 0, got {xd}, {yd}"
        ));
    }
    let a = p.alpha();
    let dim = p.d() as f64;
    let half_d = dim / 2.0;
    let kappa = p.kappa();
    let delta = x.distance(y);
    diagonal_check(delta, p)?;
    let spec = kernel_quad();
    let prefactor = (1.0 - a) * 2f64.ln() + half_d / a * p.m().ln()
        - half_d * (2.0 * PI).ln()
        - 2.0 * ln_gamma(0.5 * a);
    if delta >= NEAR_DIAGONAL {
        let upper = 4.0 * xd * yd / (delta * delta);
        let kd = kappa * delta;
        let integral = integrate_power_singular(
            |t: f64| {
                let w = (t + 1.0).sqrt();
                (t + 1.0).powf(-0.25 * dim)
                    * k_nu_scaled(half_d, kd * w)
                    * (-kd * t / (w + 1.0)).exp()
            },
            0.5 * a,
            upper,
            &spec,
        )?;
        return Ok(prefactor + (a - half_d) * delta.ln() - kd
            + positive_ln(integral, "green_halfspace integral")?);
    }
    let upper = 4.0 * xd * yd;
    if delta == 0.0 {
        // only reachable for d = 1 < alpha, where s^{1/4} K_{1/2}(kappa sqrt s) is elementary
        let c = (PI / (2.0 * kappa)).sqrt();
        let integral = integrate_power_singular(
            |s: f64| c * (-kappa * s.sqrt()).exp(),
            0.5 * (a - dim),
            upper,
            &spec,
        )?;
        return Ok(prefactor + positive_ln(integral, "green_halfspace integral")?);
    }
    let d2 = delta * delta;
    let integral = integrate_power_singular(
        |s: f64| {
            let r = (s + d2).sqrt();
            r.powf(-half_d) * k_nu_scaled(half_d, kappa * r) * (-kappa * s / (r + delta)).exp()
        },
        0.5 * a,
        upper,
        &spec,
    )?;
    Ok(prefactor - kappa * delta + positive_ln(integral, "green_halfspace integral")?)
}

/// Green function of the half-space,
/// `(2^{1-a} m^{d/2a} / ((2pi)^{d/2} Gamma(a/2)^2)) int_0^{4 x_d y_d} s^{a/2-1}
/// K_{d/2}(kappa sqrt(s+|x-y|^2)) / (s+|x-y|^2)^{d/4} ds`.
pub fn green_halfspace(x: &HalfSpacePoint, y: &HalfSpacePoint, p: &ProcessParams) -> Result<f64> {
    ln_green_halfspace(x, y, p).map(f64::exp)
}

/// Explicit lower bound for the `m = 1` Green function valid when
/// `|x - y| <= 1`:
/// `(2^{1-a}/((2pi)^{d/2} Gamma(a/2)^2)) (K_{d/2}(2)/2^{d/4}) (2/a) (4 x_d y_d ^ 1)^{a/2}`.
pub fn green_lower_bound(
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    alpha: f64,
    d: usize,
) -> Result<f64> {
    let p = ProcessParams::new(alpha, 1.0, d)?;
    check_pair_dims(&p, x, y)?;
    let (xd, yd) = (x.boundary_distance(), y.boundary_distance());
    if !(xd > 0.0 && yd > 0.0) {
        return domain("green_lower_bound needs interior points");
    }
    let dim = d as f64;
    let lead =
        2f64.powf(1.0 - alpha) / ((2.0 * PI).powf(dim / 2.0) * (ln_gamma(alpha / 2.0) * 2.0).exp());
    let bessel = k_nu(dim / 2.0, 2.0) / 2f64.powf(dim / 4.0);
    Ok(lead * bessel * (2.0 / alpha) * (4.0 * xd * yd).min(1.0).powf(alpha / 2.0))
}

/// `E^z exp(-tau_H)` for `m = 1`: `Gamma(a/2, z_d) / Gamma(a/2)`.
pub fn exit_discount(z_d: f64, alpha: f64) -> Result<f64> {
    if !(z_d > 0.0) {
        return domain(format!("exit_discount needs z_d > 0, got {z_d}"));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return domain(format!("alpha must lie in (0, 2), got {alpha}"));
    }
    upper_gamma_regularized(alpha / 2.0, z_d)
}

/// `E^z exp(-m tau_H)` for general `m`, which by scaling is
/// `Gamma(a/2, m^{1/a} z_d) / Gamma(a/2)`.
pub fn exit_discount_m(z_d: f64, p: &ProcessParams) -> Result<f64> {
    if !(z_d > 0.0) {
        return domain(format!("exit_discount needs z_d > 0, got {z_d}"));
    }
    upper_gamma_regularized(p.alpha() / 2.0, p.kappa() * z_d)
}

/// Green function of the half-space for the Brownian motion with
/// `E exp(i xi B_t) = exp(-t |xi|^2)`.
pub fn brownian_green_halfspace(x: &HalfSpacePoint, y: &HalfSpacePoint) -> Result<f64> {
    let d = x.dim();
    if y.dim() != d {
        return domain("points of different dimension");
    }
    let (xd, yd) = (x.boundary_distance(), y.boundary_distance());
    if !(xd > 0.0 && yd > 0.0) {
        return domain("brownian_green_halfspace needs interior points");
    }
    if d == 1 {
        return Ok(xd.min(yd));
    }
    let r = x.distance(y);
    if r == 0.0 {
        return Err(Error::Diagonal { alpha: 2.0, d });
    }
    let r_star = x.reflected().distance(y);
    if d == 2 {
        return Ok((r_star / r).ln() / (2.0 * PI));
    }
    let dim = d as f64;
    let c = (ln_gamma(dim / 2.0 - 1.0)).exp() / (4.0 * PI.powf(dim / 2.0));
    Ok(c * (r.powf(2.0 - dim) - r_star.powf(2.0 - dim)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> HalfSpacePoint {
        HalfSpacePoint::new(c.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        ((a - b) / b).abs() <= tol
    }

    #[test]
    fn poisson_values() {
        let p = ProcessParams::new(1.0, 1.0, 1).unwrap();
        let v = poisson_1d(1.0, -1.0, &p).unwrap();
        assert!(close(v, 0.021_539_279_301_848_63, 1e-14));
        let p3 = ProcessParams::new(1.0, 1.0, 3).unwrap();
        let v = poisson_halfspace(&pt(&[0.0, 0.0, 1.0]), &pt(&[0.0, 0.0, -1.0]), &p3).unwrap();
        assert!(close(v, 0.002_571_062_078_644_618_15, 1e-12));
        assert!(poisson_1d(1.0, 1.0, &p).is_err());
        assert!(poisson_1d(1.0, -1.0, &p3).is_err());
    }

    #[test]
    fn poisson_boundary_blowup_rate() {
        let p = ProcessParams::new(0.8, 1.0, 1).unwrap();
        let f = |u: f64| poisson_1d(1.0, u, &p).unwrap() * (-u).powf(0.4);
        assert!(close(f(-1e-9), f(-1e-10), 1e-8));
    }

    #[test]
    fn green_values() {
        let cases = [
            (1.0, 1.0, 2.0, 0.129_694_222_190_082_23),
            (0.5, 1.0, 2.0, 0.078_935_485_688_586_69),
            (0.5, 0.25, 4.0, 0.001_699_435_717_855_148),
            (0.5, 3.0, 3.5, 0.211_327_791_669_417_6),
            (1.5, 1.0, 2.0, 0.154_590_346_674_794_87),
            (1.5, 0.25, 4.0, 0.004_302_152_096_892_453),
            (1.5, 3.0, 3.5, 0.312_376_864_851_279_1),
            (1.5, 1.0, 1.0, 0.796_651_100_122_918_7),
        ];
        for &(a, x, y, want) in &cases {
            let p = ProcessParams::new(a, 1.0, 1).unwrap();
            let got = green_1d(x, y, &p).unwrap();
            assert!(
                close(got, want, 1e-10),
                "alpha {a} ({x},{y}): {got} vs {want}"
            );
            let got_h = green_halfspace(&pt(&[x]), &pt(&[y]), &p).unwrap();
            assert!(
                close(got_h, want, 1e-10),
                "halfspace alpha {a} ({x},{y}): {got_h} vs {want}"
            );
        }
    }

    #[test]
    fn green_diagonal_policy() {
        let p = ProcessParams::new(1.0, 1.0, 1).unwrap();
        assert!(matches!(
            green_1d(1.0, 1.0, &p),
            Err(Error::Diagonal { .. })
        ));
        let p2 = ProcessParams::new(1.5, 1.0, 2).unwrap();
        let x = pt(&[0.0, 1.0]);
        assert!(matches!(
            green_halfspace(&x, &x, &p2),
            Err(Error::Diagonal { .. })
        ));
    }

    #[test]
    fn green_forms_agree_across_switch() {
        let p = ProcessParams::new(1.2, 1.0, 2).unwrap();
        let x = pt(&[0.0, 1.0]);
        let below = green_halfspace(&x, &pt(&[0.0, 1.0 + 0.999_999e-3]), &p).unwrap();
        let above = green_halfspace(&x, &pt(&[0.0, 1.0 + 1.000_001e-3]), &p).unwrap();
        assert!(close(below, above, 1e-5));
    }

    #[test]
    fn green_far_apart_in_log_space() {
        let p = ProcessParams::new(1.0, 1.0, 1).unwrap();
        let lg = ln_green_1d(1.0, 1001.0, &p).unwrap();
        assert!(lg.is_finite() && lg < -990.0);
        let p2 = ProcessParams::new(1.0, 1.0, 2).unwrap();
        let lg = ln_green_halfspace(&pt(&[0.0, 1.0]), &pt(&[900.0, 1.0]), &p2).unwrap();
        assert!(lg.is_finite() && lg < -890.0);
    }

    #[test]
    fn exit_discount_values() {
        assert!(close(
            exit_discount(1.0, 1.0).unwrap(),
            0.157_299_207_050_285_13,
            1e-12
        ));
        assert!(close(
            exit_discount(0.5, 1.5).unwrap(),
            0.472_062_890_165_328_2,
            1e-12
        ));
        assert!((exit_discount(1e-14, 1.0).unwrap() - 1.0).abs() < 1e-6);
        assert!(exit_discount(0.0, 1.0).is_err());
        let p = ProcessParams::new(1.0, 2.0, 1).unwrap();
        assert!(close(
            exit_discount_m(0.5, &p).unwrap(),
            exit_discount(1.0, 1.0).unwrap(),
            1e-14
        ));
    }

    #[test]
    fn brownian_green_values() {
        assert_eq!(
            brownian_green_halfspace(&pt(&[1.0]), &pt(&[3.0])).unwrap(),
            1.0
        );
        let v = brownian_green_halfspace(&pt(&[0.0, 1.0]), &pt(&[0.0, 2.0])).unwrap();
        assert!(close(v, 0.174_849_576_283_029_9, 1e-14));
        let v = brownian_green_halfspace(&pt(&[0.0, 0.0, 1e-9]), &pt(&[0.0, 0.0, 2.0])).unwrap();
        assert!(v.abs() < 1e-9);
    }
}
