//! Kernel evaluators for the relativistic alpha-stable process
//! `X_t = B_{T(t)}`, where `B` is a Brownian motion with
//! `E exp(i xi B_t) = exp(-t |xi|^2)` and `T` is the exponentially tilted
//! `alpha/2`-stable subordinator.
//!
//! Every Gaussian kernel uses `g_u(x) = (4 pi u)^{-d/2} exp(-|x|^2 / 4u)`.
//! Kernels with exponential tails have a `ln_` companion that stays finite
//! where the value underflows.

pub(crate) mod density;
mod halfspace;
mod stable;

pub use density::{
    cauchy_density, density_fourier, density_via_subordination, levy_density, ln_cauchy_density,
    ln_density_via_subordination, ln_levy_density, ln_potential_m, ln_stable_subordinator_density,
    potential_m, stable_subordinator_density,
};
pub use halfspace::{
    brownian_green_halfspace, exit_discount, exit_discount_m, green_1d, green_halfspace,
    green_lower_bound, ln_green_1d, ln_green_halfspace, ln_poisson_1d, ln_poisson_halfspace,
    poisson_1d, poisson_constant, poisson_halfspace,
};
pub use stable::{
    stable_green_constant, stable_green_shape, stable_limit_green, stable_limit_poisson,
    stable_poisson_constant, stable_poisson_shape, STABLE_LIMIT_MASSES,
};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quadrature::QuadSpec;

/// Parameters `(alpha, m, d)` of the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessParams {
    alpha: f64,
    m: f64,
    d: usize,
}

impl ProcessParams {
    pub fn new(alpha: f64, m: f64, d: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 2), got {alpha}"
            )));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Config(format!(
                "m must be positive and finite, got {m}"
            )));
        }
        if d < 1 {
            return Err(Error::Config("dimension d must be >= 1".into()));
        }
        Ok(Self { alpha, m, d })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `m^{1/alpha}`, the inverse length scale of the kernels.
    pub fn kappa(&self) -> f64 {
        self.m.powf(1.0 / self.alpha)
    }

    /// `m^{2/alpha}`, the tilting rate of the subordinator.
    pub fn tilt(&self) -> f64 {
        self.m.powf(2.0 / self.alpha)
    }

    pub fn with_m(&self, m: f64) -> Result<Self> {
        Self::new(self.alpha, m, self.d)
    }

    pub fn with_d(&self, d: usize) -> Result<Self> {
        Self::new(self.alpha, self.m, d)
    }

    fn require_dim(&self, point: &HalfSpacePoint) -> Result<()> {
        if point.dim() != self.d {
            return domain(format!(
                "point has dimension {} but d = {}",
                point.dim(),
                self.d
            ));
        }
        Ok(())
    }
}

/// A point `x = (x_1, ..., x_d)`; the last coordinate is the distance to the
/// boundary hyperplane (negative outside the half-space).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfSpacePoint {
    coords: Vec<f64>,
}

impl HalfSpacePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return domain("a point needs at least one coordinate");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return domain(format!("point coordinates must be finite, got {coords:?}"));
        }
        Ok(Self { coords })
    }

    /// Interior point; errors unless the last coordinate is positive.
    pub fn interior(coords: Vec<f64>) -> Result<Self> {
        let p = Self::new(coords)?;
        if p.boundary_distance() <= 0.0 {
            return domain(format!(
                "interior point needs x_d > 0, got {}",
                p.boundary_distance()
            ));
        }
        Ok(p)
    }

    /// Exterior point; errors unless the last coordinate is negative.
    pub fn exterior(coords: Vec<f64>) -> Result<Self> {
        let p = Self::new(coords)?;
        if p.boundary_distance() >= 0.0 {
            return domain(format!(
                "exterior point needs u_d < 0, got {}",
                p.boundary_distance()
            ));
        }
        Ok(p)
    }

    /// Point `(0, ..., 0, last)` in dimension `d`.
    pub fn on_axis(d: usize, last: f64) -> Result<Self> {
        let mut coords = vec![0.0; d.max(1)];
        coords[d.max(1) - 1] = last;
        Self::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn boundary_distance(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    /// Reflection across the boundary, `y* = (y_1, ..., -y_d)`.
    pub fn reflected(&self) -> Self {
        let mut coords = self.coords.clone();
        let last = coords.len() - 1;
        coords[last] = -coords[last];
        Self { coords }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// A kernel value together with its logarithm, which remains meaningful
/// after the value itself has underflowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub log_value: f64,
}

impl KernelValue {
    pub fn from_log(log_value: f64) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
        }
    }

    pub fn from_value(value: f64) -> Self {
        Self {
            value,
            log_value: value.ln(),
        }
    }
}

/// Quadrature settings used inside kernel evaluations. Kernel values range
/// over hundreds of orders of magnitude, so only the relative tolerance is
/// meaningful.
pub(crate) fn kernel_quad() -> QuadSpec {
    QuadSpec::relative(1e-12)
}

fn ln_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

fn positive_ln(value: f64, what: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value.ln())
    } else {
        Err(Error::Domain(format!("{what} evaluated to {value}")))
    }
}
