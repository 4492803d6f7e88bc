//! Monte Carlo estimators built on simulated paths of the process.
//!
//! Paths are simulated on the grid `t_k = k dt`; exits are detected at grid
//! times only, so exit times are biased upwards. Paths are grouped in fixed
//! blocks, block `b` drawing from stream `stream + b`, and block results are
//! merged in block order. Results therefore depend only on the seed and the
//! partition, never on the number of worker threads.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::kernels::density::fourier_exponent;
use crate::kernels::{HalfSpacePoint, ProcessParams};
use crate::quadrature::{integrate, integrate_semi_infinite_scaled, HalfLine, QuadSpec};
use crate::specfun::ln_gamma;
use crate::subordinator::{IncrementSampler, RngStream};

/// Paths per block; each block owns one random stream.
pub const BLOCK_SIZE: u64 = 1024;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "RELKERNEL_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathConfig {
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// First stream id; block `b` uses `stream + b`.
    pub stream: u64,
    /// Worker threads; `None` uses all available (subject to `RELKERNEL_THREADS`).
    pub workers: Option<usize>,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 50.0,
            n_paths: 10_000,
            seed: 0,
            stream: 0,
            workers: None,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(Error::Config(format!(
                "dt must lie in (0, 0.1], got {}",
                self.dt
            )));
        }
        if !(self.horizon >= 1.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!(
                "horizon must be >= 1, got {}",
                self.horizon
            )));
        }
        if self.n_paths < 100 {
            return Err(Error::Config(format!(
                "n_paths must be >= 100, got {}",
                self.n_paths
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    fn steps_to(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }

    fn blocks(&self) -> u64 {
        self.n_paths.div_ceil(BLOCK_SIZE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscretizationNote {
    None,
    ExitTimeBiasedUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub discretization_note: DiscretizationNote,
}

impl Estimate {
    /// `(mean - target) / stderr`, or 0 when both the deviation and the
    /// standard error vanish.
    pub fn z_score(&self, target: f64) -> f64 {
        let dev = self.mean - target;
        if dev == 0.0 {
            0.0
        } else {
            dev / self.stderr
        }
    }
}

/// Sufficient statistics `(sum w, sum w^2, n)` of per-path weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Moments {
    pub sum: f64,
    pub sum_sq: f64,
    pub n: u64,
}

impl Moments {
    pub fn push(&mut self, w: f64) {
        self.sum += w;
        self.sum_sq += w * w;
        self.n += 1;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.n += other.n;
    }

    pub fn estimate(&self, note: DiscretizationNote) -> Estimate {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / n).sqrt(),
            n: self.n,
            discretization_note: note,
        }
    }
}

fn worker_count(cfg: &PathConfig) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut n = cfg.workers.unwrap_or(available);
    if let Some(cap) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if cap >= 1 {
            n = n.min(cap);
        }
    }
    n.max(1)
}

/// Runs `cfg.n_paths` paths, each writing `k` weights, and returns the
/// moments of every weight.
pub fn run_paths<F>(cfg: &PathConfig, k: usize, path: F) -> Result<Vec<Moments>>
where
    F: Fn(&mut RngStream, &mut [f64]) + Sync,
{
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(cfg))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let blocks: Vec<Vec<Moments>> = pool.install(|| {
        (0..cfg.blocks())
            .into_par_iter()
            .map(|b| {
                let mut rng = RngStream::new(cfg.seed, cfg.stream.wrapping_add(b));
                let count = BLOCK_SIZE.min(cfg.n_paths - b * BLOCK_SIZE);
                let mut acc = vec![Moments::default(); k];
                let mut w = vec![0.0; k];
                for _ in 0..count {
                    w.iter_mut().for_each(|v| *v = 0.0);
                    path(&mut rng, &mut w);
                    for (a, v) in acc.iter_mut().zip(&w) {
                        a.push(*v);
                    }
                }
                acc
            })
            .collect()
    });
    let mut total = vec![Moments::default(); k];
    for block in &blocks {
        for (t, m) in total.iter_mut().zip(block) {
            t.merge(m);
        }
    }
    Ok(total)
}

/// Axis-aligned box `lower <= u <= upper` in the complement of the
/// half-space; infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExteriorBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ExteriorBox {
    /// The whole complement `{u_d <= 0}`.
    pub fn complement(d: usize) -> Self {
        let lower = vec![f64::NEG_INFINITY; d];
        let mut upper = vec![f64::INFINITY; d];
        upper[d - 1] = 0.0;
        Self { lower, upper }
    }

    /// Cube of half-width `h` around an exterior point.
    pub fn around(center: &HalfSpacePoint, h: f64) -> Self {
        Self {
            lower: center.coords().iter().map(|c| c - h).collect(),
            upper: center.coords().iter().map(|c| c + h).collect(),
        }
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).max(0.0))
            .product()
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.lower.len() != d || self.upper.len() != d {
            return Err(Error::Config(format!("box must have {d} coordinates")));
        }
        if self.upper[d - 1] > 0.0 {
            return Err(Error::Config(
                "box must lie in the complement u_d <= 0".into(),
            ));
        }
        Ok(())
    }

    fn contains(&self, u: &[f64]) -> bool {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(c, (l, h))| *l <= *c && *c <= *h)
    }
}

/// Ball around an interior point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ball {
    pub center: HalfSpacePoint,
    pub radius: f64,
}

impl Ball {
    pub const DEFAULT_RADIUS: f64 = 0.1;

    pub fn new(center: HalfSpacePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return domain("ball radius must be positive");
        }
        if center.boundary_distance() <= radius {
            return domain("ball must lie inside the half-space");
        }
        Ok(Self { center, radius })
    }

    pub fn volume(&self) -> f64 {
        let d = self.center.dim() as f64;
        (0.5 * d * PI.ln() - ln_gamma(0.5 * d + 1.0)).exp() * self.radius.powf(d)
    }

    fn contains(&self, x: &[f64]) -> bool {
        let r2: f64 = x
            .iter()
            .zip(self.center.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        r2 <= self.radius * self.radius
    }
}

fn require_interior(x: &HalfSpacePoint, p: &ProcessParams) -> Result<()> {
    if x.dim() != p.d() {
        return Err(Error::Config(format!(
            "start point has dimension {} but d = {}",
            x.dim(),
            p.d()
        )));
    }
    if x.boundary_distance() <= 0.0 {
        return Err(Error::Config("start point must be interior".into()));
    }
    Ok(())
}

/// `E^x[e^{-m tau}; X_tau in region]`, the `m`-harmonic measure of the
/// region. Paths alive at the horizon are dropped (their weight would be at
/// most `e^{-m horizon}`).
pub fn estimate_harmonic_measure(
    x: &HalfSpacePoint,
    region: &ExteriorBox,
    p: &ProcessParams,
    cfg: &PathConfig,
) -> Result<Estimate> {
    require_interior(x, p)?;
    region.validate(p.d())?;
    let sampler = IncrementSampler::new(cfg.dt, p)?;
    let steps = cfg.steps_to(cfg.horizon);
    let d = p.d();
    let start = x.coords().to_vec();
    let m = p.m();
    let dt = cfg.dt;
    let (xd, xbar) = (x.boundary_distance(), &start[..d - 1]);
    let moments = run_paths(cfg, 1, |rng, w| {
        use rand::Rng;
        let mut y = xd;
        let mut clock = 0.0;
        for k in 1..=steps {
            let v = sampler.sample_time(rng);
            clock += v;
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            y += (2.0 * v).sqrt() * z;
            if y <= 0.0 {
                let mut exit = Vec::with_capacity(d);
                // horizontal coordinates given the subordinator are Gaussian
                let sd = (2.0 * clock).sqrt();
                for c in xbar {
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    exit.push(c + sd * z);
                }
                exit.push(y);
                if region.contains(&exit) {
                    w[0] = (-m * k as f64 * dt).exp();
                }
                return;
            }
        }
    })?;
    Ok(moments[0].estimate(DiscretizationNote::ExitTimeBiasedUp))
}

/// `P^x(tau_H >= t)` at each of the given times, from one set of paths.
pub fn estimate_survival_curve(
    x: &HalfSpacePoint,
    times: &[f64],
    p: &ProcessParams,
    cfg: &PathConfig,
) -> Result<Vec<Estimate>> {
    require_interior(x, p)?;
    if times.iter().any(|&t| !(t >= 0.0 && t <= cfg.horizon)) {
        return Err(Error::Config(
            "survival times must lie in [0, horizon]".into(),
        ));
    }
    let sampler = IncrementSampler::new(cfg.dt, p)?;
    let checkpoints: Vec<usize> = times.iter().map(|&t| cfg.steps_to(t)).collect();
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    let xd = x.boundary_distance();
    let moments = run_paths(cfg, times.len(), |rng, w| {
        use rand::Rng;
        let mut y = xd;
        let mut k = 0;
        let mut alive_until = last;
        while k < last {
            k += 1;
            let v = sampler.sample_time(rng);
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            y += (2.0 * v).sqrt() * z;
            if y <= 0.0 {
                alive_until = k - 1;
                break;
            }
        }
        for (wj, &c) in w.iter_mut().zip(&checkpoints) {
            *wj = if c <= alive_until { 1.0 } else { 0.0 };
        }
    })?;
    Ok(moments
        .iter()
        .map(|m| m.estimate(DiscretizationNote::ExitTimeBiasedUp))
        .collect())
}

/// `P^x(tau_H >= t)`.
pub fn estimate_survival(
    x: &HalfSpacePoint,
    t: f64,
    p: &ProcessParams,
    cfg: &PathConfig,
) -> Result<Estimate> {
    Ok(estimate_survival_curve(x, &[t], p, cfg)?[0])
}

// Occupation of a ball by the killed path, weighted by `discount(t)`, with
// optional survival indicators at the given step counts.
fn occupation<D>(
    x: &HalfSpacePoint,
    ball: &Ball,
    p: &ProcessParams,
    cfg: &PathConfig,
    discount: D,
    checkpoints: &[usize],
) -> Result<Vec<Moments>>
where
    D: Fn(f64) -> f64 + Sync,
{
    require_interior(x, p)?;
    if ball.center.dim() != p.d() {
        return Err(Error::Config("ball has the wrong dimension".into()));
    }
    let sampler = IncrementSampler::new(cfg.dt, p)?;
    let steps = cfg.steps_to(cfg.horizon);
    let d = p.d();
    let dt = cfg.dt;
    let scale = dt / ball.volume();
    let start = x.coords().to_vec();
    run_paths(cfg, 1 + checkpoints.len(), |rng, w| {
        let mut pos = start.clone();
        let mut step = vec![0.0; d];
        let mut occ = 0.0;
        let mut alive_until = steps;
        for k in 1..=steps {
            sampler.sample_into(rng, &mut step);
            for (c, s) in pos.iter_mut().zip(&step) {
                *c += s;
            }
            if pos[d - 1] <= 0.0 {
                alive_until = k - 1;
                break;
            }
            if ball.contains(&pos) {
                occ += discount(k as f64 * dt);
            }
        }
        w[0] = occ * scale;
        for (wj, &c) in w[1..].iter_mut().zip(checkpoints) {
            *wj = if c <= alive_until { 1.0 } else { 0.0 };
        }
    })
}

/// Ball average of the `m`-Green function `G_H(x, .)`: discounted
/// occupation time of the ball before exit divided by its volume.
pub fn estimate_green1(
    x: &HalfSpacePoint,
    ball: &Ball,
    p: &ProcessParams,
    cfg: &PathConfig,
) -> Result<Estimate> {
    let m = p.m();
    let moments = occupation(x, ball, p, cfg, |t| (-m * t).exp(), &[])?;
    Ok(moments[0].estimate(DiscretizationNote::ExitTimeBiasedUp))
}

/// Estimate of the undiscounted Green function `G^0_H`, split into the
/// simulated part up to the horizon and a band for the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Green0Estimate {
    /// Occupation density accumulated before the horizon.
    pub truncated: Estimate,
    /// `int_H^inf (p_t(x-y) - p_t(x-y*)) dt`, a lower bound for the remainder.
    pub tail_lower: f64,
    /// `int_H^inf sup p_{t/3} S_x(t/3) S_y(t/3) dt` with the survival
    /// probabilities beyond the horizon extrapolated by `C (x_d + ln t) / t^{1/2}`.
    pub tail_upper: f64,
    /// `truncated.mean + tail_lower`.
    pub mean: f64,
    pub stderr: f64,
}

const SURVIVAL_CHECKPOINTS: usize = 24;

/// Ball average of `G^0_H(x, .)`. For `d = 1` the integral beyond the
/// horizon is bracketed by [`Green0Estimate::tail_lower`] and
/// [`Green0Estimate::tail_upper`]; in higher dimensions the horizon must be
/// long enough for the remainder to be negligible and both tails are zero.
pub fn estimate_green0(
    x: &HalfSpacePoint,
    ball: &Ball,
    p: &ProcessParams,
    cfg: &PathConfig,
) -> Result<Green0Estimate> {
    let steps = cfg.steps_to(cfg.horizon);
    let checkpoints: Vec<usize> = (0..SURVIVAL_CHECKPOINTS)
        .map(|j| {
            let frac = 1.0 / 3.0 + (2.0 / 3.0) * j as f64 / (SURVIVAL_CHECKPOINTS - 1) as f64;
            ((steps as f64 * frac).round() as usize).min(steps)
        })
        .collect();
    let moments = occupation(x, ball, p, cfg, |_| 1.0, &checkpoints)?;
    let truncated = moments[0].estimate(DiscretizationNote::ExitTimeBiasedUp);
    let (tail_lower, tail_upper) = if p.d() == 1 {
        let times: Vec<f64> = checkpoints.iter().map(|&c| c as f64 * cfg.dt).collect();
        let sx: Vec<f64> = moments[1..].iter().map(|m| m.sum / m.n as f64).collect();
        // the survival of the ball centre is approximated by a second run
        let sy = estimate_survival_curve(
            &ball.center,
            &times,
            p,
            &PathConfig {
                stream: cfg.stream + (1 << 32),
                ..cfg.clone()
            },
        )?;
        let sy: Vec<f64> = sy.iter().map(|e| e.mean).collect();
        let lo = killed_tail_lower(
            x.boundary_distance(),
            ball.center.boundary_distance(),
            cfg.horizon,
            p,
        )?;
        let hi = killed_tail_upper(
            cfg.horizon,
            &times,
            &sx,
            &sy,
            x.boundary_distance(),
            ball.center.boundary_distance(),
            p,
        )?;
        (lo, hi)
    } else {
        (0.0, 0.0)
    };
    Ok(Green0Estimate {
        truncated,
        tail_lower,
        tail_upper,
        mean: truncated.mean + tail_lower,
        stderr: truncated.stderr,
    })
}

// psi(xi) = -(m - (xi^2 + m^{2/a})^{a/2}) >= 0, the characteristic exponent.
fn char_exponent(xi: f64, p: &ProcessParams) -> f64 {
    -fourier_exponent(xi * xi, 1.0, p)
}

/// `int_H^inf (p_t(x-y) - p_t(x+y)) dt` in `d = 1`, through
/// `(2/pi) int_0^inf sin(xi x) sin(xi y) e^{-H psi(xi)} / psi(xi) dxi`.
pub fn killed_tail_lower(x: f64, y: f64, horizon: f64, p: &ProcessParams) -> Result<f64> {
    if p.d() != 1 {
        return domain("killed_tail_lower is one-dimensional");
    }
    let curvature = 0.5 * p.alpha() * p.m() / p.tilt();
    let scale = 1.0 / (horizon * curvature).sqrt();
    let f = |xi: f64| {
        if xi <= 0.0 {
            return 0.0;
        }
        let psi = char_exponent(xi, p);
        if psi <= 0.0 {
            return 2.0 * x * y / curvature;
        }
        2.0 * (xi * x).sin() * (xi * y).sin() * (-horizon * psi).exp() / psi
    };
    let v = integrate_semi_infinite_scaled(
        f,
        HalfLine::Above(0.0),
        scale,
        &QuadSpec::new(1e-9, 1e-15, 4000)?,
    )?;
    Ok(v / PI)
}

// sup_z p_t(z) = p_t(0) = (1/pi) int_0^inf e^{-t psi(xi)} dxi.
fn density_at_origin(t: f64, p: &ProcessParams) -> Result<f64> {
    let curvature = 0.5 * p.alpha() * p.m() / p.tilt();
    let scale = 1.0 / (t * curvature).sqrt().max(t.powf(1.0 / p.alpha()));
    let v = integrate_semi_infinite_scaled(
        |xi: f64| (-t * char_exponent(xi, p)).exp(),
        HalfLine::Above(0.0),
        scale,
        &QuadSpec::new(1e-9, 1e-300, 4000)?,
    )?;
    Ok(v / PI)
}

fn killed_tail_upper(
    horizon: f64,
    times: &[f64],
    sx: &[f64],
    sy: &[f64],
    xd: f64,
    yd: f64,
    p: &ProcessParams,
) -> Result<f64> {
    let interp = |s: &[f64], t: f64| -> f64 {
        let j = times.partition_point(|&u| u <= t).clamp(1, times.len() - 1);
        let (t0, t1) = (times[j - 1], times[j]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        s[j - 1] * (1.0 - w) + s[j] * w
    };
    let t_end = *times.last().unwrap_or(&horizon);
    let envelope = |s_end: f64, start: f64, t: f64| {
        s_end * (start + t.ln()) / (start + t_end.ln()) * (t_end / t).sqrt()
    };
    let survival = |s: &[f64], start: f64, t: f64| {
        if t <= t_end {
            interp(s, t)
        } else {
            envelope(s[s.len() - 1], start, t)
        }
    };
    let spec = QuadSpec::new(1e-6, 1e-15, 2000)?;
    let f = |t: f64| {
        let third = t / 3.0;
        density_at_origin(third, p).unwrap_or(0.0)
            * survival(sx, xd, third)
            * survival(sy, yd, third)
    };
    let near = integrate(f, horizon, 3.0 * horizon, &spec)?;
    // beyond 3H in the variable ln t
    let far = integrate_semi_infinite_scaled(
        |s: f64| {
            let t = s.exp();
            f(t) * t
        },
        HalfLine::Above((3.0 * horizon).ln()),
        2.0,
        &spec,
    )?;
    Ok(near + far)
}

/// `E^x tau_(0,1)` for `d = 1`. Paths still inside at the horizon count with
/// the horizon as their exit time.
pub fn estimate_interval_exit(x: f64, p: &ProcessParams, cfg: &PathConfig) -> Result<Estimate> {
    if p.d() != 1 {
        return Err(Error::Config("interval exit needs d = 1".into()));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Config(format!(
            "start point must lie in (0, 1), got {x}"
        )));
    }
    let sampler = IncrementSampler::new(cfg.dt, p)?;
    let steps = cfg.steps_to(cfg.horizon);
    let dt = cfg.dt;
    let moments = run_paths(cfg, 1, |rng, w| {
        use rand::Rng;
        let mut y = x;
        for k in 1..=steps {
            let v = sampler.sample_time(rng);
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            y += (2.0 * v).sqrt() * z;
            if y <= 0.0 || y >= 1.0 {
                w[0] = k as f64 * dt;
                return;
            }
        }
        w[0] = steps as f64 * dt;
    })?;
    Ok(moments[0].estimate(DiscretizationNote::ExitTimeBiasedUp))
}

/// Sub-density of surviving paths at time `t` over the given bins
/// (`d = 1`): weight `1{tau > t, X_t in bin} / width`.
pub fn estimate_killed_density(
    x: f64,
    t: f64,
    bins: &[(f64, f64)],
    p: &ProcessParams,
    cfg: &PathConfig,
) -> Result<Vec<Estimate>> {
    if p.d() != 1 {
        return Err(Error::Config("killed density histogram needs d = 1".into()));
    }
    if !(x > 0.0) || !(t > 0.0 && t <= cfg.horizon) {
        return Err(Error::Config("need x > 0 and 0 < t <= horizon".into()));
    }
    let sampler = IncrementSampler::new(cfg.dt, p)?;
    let steps = cfg.steps_to(t);
    let moments = run_paths(cfg, bins.len(), |rng, w| {
        use rand::Rng;
        let mut y = x;
        for _ in 0..steps {
            let v = sampler.sample_time(rng);
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            y += (2.0 * v).sqrt() * z;
            if y <= 0.0 {
                return;
            }
        }
        for (wj, &(lo, hi)) in w.iter_mut().zip(bins) {
            if lo <= y && y < hi {
                *wj = 1.0 / (hi - lo);
            }
        }
    })?;
    Ok(moments
        .iter()
        .map(|m| m.estimate(DiscretizationNote::ExitTimeBiasedUp))
        .collect())
}
