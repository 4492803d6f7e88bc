//! One-dimensional transition densities by discrete inversion of the
//! characteristic function `exp(mt - t (z^2 + m^{2/a})^{a/2})`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{domain, Result};
use crate::kernels::ProcessParams;

/// Frequency grid `z_k = (k - n/2) dz`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierGrid {
    pub n: usize,
    pub dz: f64,
}

impl FourierGrid {
    pub const DEFAULT_N: usize = 65_536;
    pub const DEFAULT_DZ: f64 = 0.05;

    /// Grid wide enough that the transform has decayed below `e^{-40}` at
    /// the cut-off and fine enough that the spatial period exceeds the
    /// `e^{-40}` decay length of the density.
    pub fn for_density(t: f64, p: &ProcessParams) -> Self {
        let mut z_max = 1.0;
        while crate::kernels::density_fourier(&[z_max], t, p).is_ok_and(|v| v > (-40f64).exp()) {
            z_max *= 2.0;
        }
        let dz = Self::DEFAULT_DZ.min(PI * p.kappa() / 40.0);
        let n = ((2.0 * z_max / dz).ceil() as usize)
            .next_power_of_two()
            .max(Self::DEFAULT_N);
        Self { n, dz }
    }

    /// Spatial step `2 pi / (n dz)`.
    pub fn dx(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dz)
    }
}

/// Density values on `x_j = (j - n/2) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub dx: f64,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.values.len() / 2) as f64) * self.dx
    }

    /// Index of the grid point `x = k dx`.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let j = k + (self.values.len() / 2) as i64;
        (0..self.values.len() as i64)
            .contains(&j)
            .then_some(j as usize)
    }
}

fn require_line(t: f64, p: &ProcessParams) -> Result<()> {
    if p.d() != 1 {
        return domain("Fourier inversion is implemented for d = 1");
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    Ok(())
}

/// `p_t` on the whole spatial grid by one FFT:
/// `p_j = (dz / 2pi) (-1)^{j + n/2} FFT[phi_k (-1)^k]_j`.
pub fn invert_density(t: f64, p: &ProcessParams, grid: FourierGrid) -> Result<DensityGrid> {
    require_line(t, p)?;
    if grid.n < 4 || !grid.n.is_multiple_of(4) || !(grid.dz > 0.0) {
        return domain("Fourier grid needs n divisible by 4 and dz > 0");
    }
    let n = grid.n;
    let half = (n / 2) as f64;
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let z = (k as f64 - half) * grid.dz;
            let phi = crate::kernels::density::fourier_exponent(z * z, t, p).exp();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex::new(sign * phi, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = grid.dz / (2.0 * PI);
    let values = buf
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let sign = if (j + n / 2).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sign * scale * c.re
        })
        .collect();
    Ok(DensityGrid {
        dx: grid.dx(),
        values,
    })
}

/// `p_t(x)` from the same discrete transform evaluated at a single point,
/// `(dz / 2pi) sum_k phi(z_k) cos(z_k x)`.
pub fn density_by_inversion(t: f64, x: f64, p: &ProcessParams) -> Result<f64> {
    require_line(t, p)?;
    let grid = FourierGrid::for_density(t, p);
    let half = grid.n / 2;
    let mut sum = crate::kernels::density::fourier_exponent(0.0, t, p).exp();
    for k in 1..=half {
        let z = k as f64 * grid.dz;
        let phi = crate::kernels::density::fourier_exponent(z * z, t, p).exp();
        let w = if k == half { 1.0 } else { 2.0 };
        sum += w * phi * (z * x).cos();
    }
    Ok(sum * grid.dz / (2.0 * PI))
}
