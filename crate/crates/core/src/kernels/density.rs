//! Whole-space objects: transition densities, the `m`-potential and the
//! Levy density.

use std::f64::consts::PI;

use super::{kernel_quad, ln_sum_exp, positive_ln, ProcessParams};
use crate::error::{domain, Result};
use crate::quadrature::{integrate, integrate_semi_infinite, HalfLine, QuadSpec};
use crate::specfun::{ln_gamma, ln_k_nu};

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

fn require_len(x: &[f64], p: &ProcessParams) -> Result<()> {
    if x.len() != p.d() {
        return domain(format!("vector has length {} but d = {}", x.len(), p.d()));
    }
    if x.iter().any(|c| !c.is_finite()) {
        return domain("vector entries must be finite");
    }
    Ok(())
}

/// Log of [`cauchy_density`].
pub fn ln_cauchy_density(t: f64, x: &[f64], p: &ProcessParams) -> Result<f64> {
    if p.alpha() != 1.0 {
        return domain(format!(
            "the Cauchy density needs alpha = 1, got {}",
            p.alpha()
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    require_len(x, p)?;
    let m = p.m();
    let nu = (p.d() as f64 + 1.0) / 2.0;
    let r = (norm_sq(x) + t * t).sqrt();
    Ok(2f64.ln() + nu * (m / (2.0 * PI)).ln() + t.ln() + m * t + ln_k_nu(nu, m * r) - nu * r.ln())
}

/// Transition density of the relativistic Cauchy process (`alpha = 1`),
/// `2 (m/2pi)^{(d+1)/2} t e^{mt} K_{(d+1)/2}(m R) / R^{(d+1)/2}` with
/// `R = (|x|^2 + t^2)^{1/2}`.
pub fn cauchy_density(t: f64, x: &[f64], p: &ProcessParams) -> Result<f64> {
    ln_cauchy_density(t, x, p).map(f64::exp)
}

/// Fourier transform of the transition density,
/// `exp(mt - t (|z|^2 + m^{2/a})^{a/2})`.
pub fn density_fourier(z: &[f64], t: f64, p: &ProcessParams) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    require_len(z, p)?;
    Ok(fourier_exponent(norm_sq(z), t, p).exp())
}

/// `mt - t (|z|^2 + m^{2/a})^{a/2}` written so that it vanishes exactly at
/// `z = 0`.
pub(crate) fn fourier_exponent(z_sq: f64, t: f64, p: &ProcessParams) -> f64 {
    let a = p.alpha();
    -t * p.m() * (0.5 * a * (z_sq / p.tilt()).ln_1p()).exp_m1()
}

// ln(sin z / z), accurate as z -> 0.
fn ln_sinc(z: f64) -> f64 {
    if z < 0.5 {
        // (sin z - z) / z as a Taylor series
        let z2 = z * z;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..=9 {
            term *= -z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum.ln_1p()
    } else {
        (z.sin() / z).ln()
    }
}

// ln A(phi) - ln A(0) for the Zolotarev function
// A(phi) = sin(a phi)^{a/b} sin(b phi) / sin(phi)^{1/b}, b = 1 - a,
// with phi measured from 0 (`from_pi = false`) or from pi.
fn zolotarev_excess(angle: f64, a: f64, from_pi: bool) -> f64 {
    let b = 1.0 - a;
    if !from_pi {
        return ((a / b) * ln_sinc(a * angle) + ln_sinc(b * angle) - ln_sinc(angle) / b).max(0.0);
    }
    let phi = std::f64::consts::PI - angle;
    let ln_a = (a / b) * (a * phi).sin().ln() + (b * phi).sin().ln() - angle.sin().ln() / b;
    ln_a - ((a / b) * a.ln() + b.ln())
}

/// Log of [`stable_subordinator_density`].
pub fn ln_stable_subordinator_density(t: f64, u: f64, index: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite() && u > 0.0 && u.is_finite()) {
        return domain(format!(
            "stable density needs t, u > 0, got t = {t}, u = {u}"
        ));
    }
    if !(index > 0.0 && index < 1.0) {
        return domain(format!("stable index must lie in (0, 1), got {index}"));
    }
    let a = index;
    let b = 1.0 - a;
    let ln_x = u.ln() - t.ln() / a;
    let xi = (-ln_x * a / b).exp();
    let ln_a0 = (a / b) * a.ln() + b.ln();
    let a0 = ln_a0.exp();
    // integrand A e^{-xi (A - A0)} relative to A0
    let integrand = |angle: f64, from_pi: bool| {
        if angle <= 0.0 {
            return 0.0;
        }
        let excess = zolotarev_excess(angle, a, from_pi);
        let v = excess - xi * a0 * excess.exp_m1();
        if v.is_nan() {
            0.0
        } else {
            v.exp()
        }
    };
    let spec = kernel_quad();
    let half = PI / 2.0;
    // near phi = 0 the mass sits in a layer of width ~ (xi A0 c)^{-1/2}
    let curvature = (1.0 - a * a * a - b * b * b) / (6.0 * b);
    let mut total = 0.0;
    let mut lo = 0.0;
    let mut edge = (1.0 / (xi * a0 * curvature).sqrt()).min(half);
    loop {
        total += integrate(|phi| integrand(phi, false), lo, edge, &spec)?;
        if edge >= half {
            break;
        }
        lo = edge;
        edge = (edge * 4.0).min(half);
    }
    // near phi = pi, A ~ sin(a pi)^{1/b} psi^{-1/b} and the integrand peaks where xi A ~ 1
    let excess_mid = zolotarev_excess(half, a, true);
    if xi * a0 * excess_mid.exp_m1() < 800.0 {
        let peak = ((a * PI).sin().powf(1.0 / b) * xi).powf(b).min(half);
        let mut lo = 0.0;
        let mut edge = 0.25 * peak;
        loop {
            total += integrate(|psi| integrand(psi, true), lo, edge, &spec)?;
            if edge >= half {
                break;
            }
            lo = edge;
            edge = (edge * 4.0).min(half);
        }
    }
    let ln_g = (a / (b * PI)).ln() - ln_x / b - xi * a0
        + ln_a0
        + positive_ln(total, "stable density integral")?;
    Ok(ln_g - t.ln() / a)
}

/// Density `theta(t, u)` of the `index`-stable subordinator with Laplace
/// transform `exp(-t lambda^index)`, from the Zolotarev integral
/// representation.
pub fn stable_subordinator_density(t: f64, u: f64, index: f64) -> Result<f64> {
    ln_stable_subordinator_density(t, u, index).map(f64::exp)
}

/// Log of [`density_via_subordination`].
pub fn ln_density_via_subordination(t: f64, x: &[f64], p: &ProcessParams) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    require_len(x, p)?;
    let a = p.alpha() / 2.0;
    let dim = p.d() as f64;
    let lambda = p.tilt();
    let r_sq = norm_sq(x);
    let mt = p.m() * t;
    // integrand in s = ln u, relative to the exponent at the split point
    let ln_integrand = |s: f64| -> f64 {
        let u = s.exp();
        let Ok(ln_theta) = ln_stable_subordinator_density(t, u, a) else {
            return f64::NEG_INFINITY;
        };
        mt + ln_theta - lambda * u - 0.5 * dim * (4.0 * PI * u).ln() - r_sq / (4.0 * u) + s
    };
    let mean = t * a * lambda.powf(a - 1.0);
    let s0 = mean.max(0.25 * r_sq / dim).ln();
    let shift = ln_integrand(s0);
    let shift = if shift.is_finite() { shift } else { 0.0 };
    let f = |s: f64| {
        let v = ln_integrand(s) - shift;
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    };
    let spec = QuadSpec::relative(1e-11);
    let below = integrate_semi_infinite(f, HalfLine::Below(s0), &spec)?;
    let above = integrate_semi_infinite(f, HalfLine::Above(s0), &spec)?;
    let ln_below = if below > 0.0 {
        below.ln()
    } else {
        f64::NEG_INFINITY
    };
    let ln_total = ln_sum_exp(ln_below, positive_ln(above, "subordination integral")?);
    Ok(shift + ln_total)
}

/// Transition density `p^m_t(x) = int_0^inf theta(t,u,m) g_u(x) du` with the
/// tilted subordinator density `theta(t,u,m) = e^{mt} theta(t,u) e^{-m^{2/a} u}`.
pub fn density_via_subordination(t: f64, x: &[f64], p: &ProcessParams) -> Result<f64> {
    ln_density_via_subordination(t, x, p).map(f64::exp)
}

/// Log of [`potential_m`].
pub fn ln_potential_m(x: &[f64], p: &ProcessParams) -> Result<f64> {
    require_len(x, p)?;
    let a = p.alpha();
    let dim = p.d() as f64;
    let nu = (dim - a) / 2.0;
    let ln_c = (1.0 - (dim + a) / 2.0) * 2f64.ln() - ln_gamma(a / 2.0) - 0.5 * dim * PI.ln();
    let kappa = p.kappa();
    let ln_front = ln_c + (dim - a) / (2.0 * a) * p.m().ln();
    let r = norm_sq(x).sqrt();
    if r == 0.0 {
        if a <= dim {
            return domain("the m-potential is singular at 0 when alpha <= d");
        }
        // r^{-nu} K_nu(kappa r) -> Gamma(|nu|) 2^{|nu|-1} kappa^{-|nu|}
        let n = -nu;
        return Ok(ln_front + ln_gamma(n) + (n - 1.0) * 2f64.ln() - n * kappa.ln());
    }
    Ok(ln_front + ln_k_nu(nu, kappa * r) - nu * r.ln())
}

/// The `m`-potential `U^m_m(x) = int_0^inf e^{-mt} p^m_t(x) dt`,
/// `C m^{(d-a)/2a} K_{(d-a)/2}(kappa |x|) / |x|^{(d-a)/2}` with
/// `C = 2^{1-(d+a)/2} / (Gamma(a/2) pi^{d/2})`.
pub fn potential_m(x: &[f64], p: &ProcessParams) -> Result<f64> {
    ln_potential_m(x, p).map(f64::exp)
}

/// Log of [`levy_density`].
pub fn ln_levy_density(x: &[f64], p: &ProcessParams) -> Result<f64> {
    require_len(x, p)?;
    let r = norm_sq(x).sqrt();
    if r == 0.0 {
        return domain("the Levy density is singular at 0");
    }
    let a = p.alpha();
    let dim = p.d() as f64;
    let nu = (dim + a) / 2.0;
    let kappa = p.kappa();
    let ln_c = a.ln() + 0.5 * (a - dim) * 2f64.ln() - 0.5 * dim * PI.ln() - ln_gamma(1.0 - a / 2.0);
    Ok(ln_c + nu * (kappa / r).ln() + ln_k_nu(nu, kappa * r))
}

/// Density of the Levy measure,
/// `(a 2^{(a-d)/2} / (pi^{d/2} Gamma(1-a/2))) (kappa/|x|)^{(d+a)/2} K_{(d+a)/2}(kappa |x|)`.
pub fn levy_density(x: &[f64], p: &ProcessParams) -> Result<f64> {
    ln_levy_density(x, p).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_semi_infinite, integrate_semi_infinite_scaled};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        ((a - b) / b).abs() <= tol
    }

    fn params(alpha: f64, m: f64, d: usize) -> ProcessParams {
        ProcessParams::new(alpha, m, d).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let p = params(1.0, 1.0, 1);
        assert!(close(
            cauchy_density(1.0, &[0.0], &p).unwrap(),
            0.520_803_829_991_670_05,
            1e-13
        ));
        assert!(close(
            potential_m(&[1.0], &p).unwrap(),
            0.134_016_241_016_994_27,
            1e-13
        ));
        assert!(close(
            levy_density(&[1.0], &p).unwrap(),
            0.191_593_021_937_282_43,
            1e-13
        ));
        let f = density_fourier(&[1.0], 1.0, &p).unwrap();
        assert!(close(f, (1.0 - 2f64.sqrt()).exp(), 1e-15));
        assert_eq!(
            density_fourier(&[0.0, 0.0], 3.0, &params(0.7, 2.0, 2)).unwrap(),
            1.0
        );
        assert!(cauchy_density(0.0, &[0.0], &p).is_err());
        assert!(cauchy_density(1.0, &[0.0], &params(1.2, 1.0, 1)).is_err());
        assert!(levy_density(&[0.0], &p).is_err());
        assert!(potential_m(&[0.0], &p).is_err());
    }

    #[test]
    fn potential_at_origin_when_alpha_exceeds_d() {
        let p = params(1.5, 1.0, 1);
        let at0 = potential_m(&[0.0], &p).unwrap();
        let near = potential_m(&[1e-7], &p).unwrap();
        assert!(close(near, at0, 1e-3));
    }

    #[test]
    fn levy_distribution_closed_form() {
        for &(t, u) in &[
            (1.0f64, 1.0f64),
            (0.5, 0.02),
            (2.0, 30.0),
            (1.0, 1e-3),
            (0.3, 400.0),
        ] {
            let want = t / (4.0 * PI).sqrt() * u.powf(-1.5) * (-t * t / (4.0 * u)).exp();
            let got = stable_subordinator_density(t, u, 0.5).unwrap();
            assert!(close(got, want, 1e-10), "({t}, {u}): {got} vs {want}");
        }
    }

    #[test]
    fn stable_density_normalization_and_laplace() {
        for &index in &[0.25, 0.5, 0.75] {
            for &t in &[1.0, 2.0] {
                let spec = QuadSpec::relative(1e-10);
                let lt = |lambda: f64| {
                    let scale = if lambda == 0.0 { 2.0 / index } else { 1.0 };
                    let f = |s: f64| {
                        let u = s.exp();
                        let th = stable_subordinator_density(t, u, index).unwrap();
                        th * (-lambda * u).exp() * u
                    };
                    integrate_semi_infinite_scaled(f, HalfLine::Above(0.0), scale, &spec).unwrap()
                        + integrate_semi_infinite(f, HalfLine::Below(0.0), &spec).unwrap()
                };
                let mass = lt(0.0);
                assert!(
                    (mass - 1.0).abs() < 1e-7,
                    "index {index} t {t}: mass {mass}"
                );
                let want = (-t).exp();
                assert!(close(lt(1.0), want, 1e-8), "index {index} t {t}");
            }
        }
    }

    #[test]
    fn subordination_matches_cauchy() {
        for &d in &[1usize, 2, 3] {
            for &(t, r, m) in &[
                (1.0, 0.0, 1.0),
                (0.5, 1.3, 1.0),
                (2.0, 0.4, 0.5),
                (1.0, 3.0, 2.0),
            ] {
                let p = params(1.0, m, d);
                let mut x = vec![0.0; d];
                x[0] = r;
                let want = cauchy_density(t, &x, &p).unwrap();
                let got = density_via_subordination(t, &x, &p).unwrap();
                assert!(
                    close(got, want, 1e-9),
                    "d {d} t {t} r {r} m {m}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn subordination_spot_value() {
        let p = params(0.5, 1.0, 1);
        let got = density_via_subordination(1.0, &[0.0], &p).unwrap();
        assert!(close(got, 1.516_265_296_516_655_8, 1e-8), "{got}");
    }
}
