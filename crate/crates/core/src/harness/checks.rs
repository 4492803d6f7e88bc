//! Verification suites. Every check produces a [`CheckReport`] comparing a
//! computed `lhs` with a reference `rhs`; failures are reported, never raised.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use super::table::{Cell, Table};
use crate::error::{Error, Result};
use crate::fourier::{invert_density, FourierGrid};
use crate::identities::{green_compensator, poisson_mass, sweep_integral};
use crate::kernels::{
    brownian_green_halfspace, cauchy_density, density_via_subordination, exit_discount,
    exit_discount_m, green_1d, green_halfspace, green_lower_bound, ln_green_1d, ln_green_halfspace,
    ln_poisson_1d, ln_poisson_halfspace, poisson_1d, poisson_halfspace, potential_m,
    stable_green_shape, stable_limit_green, stable_limit_poisson, stable_poisson_shape,
    HalfSpacePoint, ProcessParams,
};
use crate::mc::{estimate_green0, estimate_harmonic_measure, Ball, ExteriorBox, PathConfig};
use crate::subordinator::{RngStream, TemperedSampler};

/// Outcome of one identity check. `pass` holds iff
/// `|lhs - rhs| <= tolerance * max(1, |rhs|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub elapsed_s: f64,
}

pub fn passes(lhs: f64, rhs: f64, tolerance: f64) -> bool {
    (lhs - rhs).abs() <= tolerance * rhs.abs().max(1.0)
}

impl CheckReport {
    pub fn new(
        check_name: &str,
        inputs: String,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        elapsed_s: f64,
    ) -> Self {
        Self {
            check_name: check_name.to_string(),
            inputs,
            lhs,
            rhs,
            tolerance,
            pass: passes(lhs, rhs, tolerance),
            elapsed_s,
        }
    }
}

// Times `f` and turns its result into a report; an error becomes a failing
// report whose inputs carry the message.
fn check<F>(name: &str, inputs: String, rhs: f64, tolerance: f64, f: F) -> CheckReport
where
    F: FnOnce() -> Result<f64>,
{
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed().as_secs_f64();
    match out {
        Ok(lhs) => CheckReport::new(name, inputs, lhs, rhs, tolerance, elapsed),
        Err(e) => {
            let mut r = CheckReport::new(
                name,
                format!("{inputs} error=\"{e}\""),
                f64::NAN,
                rhs,
                tolerance,
                elapsed,
            );
            r.pass = false;
            r
        }
    }
}

pub fn reports_table(reports: &[CheckReport]) -> Table {
    let mut t = Table::new([
        "check_name",
        "inputs",
        "lhs",
        "rhs",
        "tolerance",
        "pass",
        "elapsed_s",
    ]);
    for r in reports {
        t.push(vec![
            Cell::from(r.check_name.as_str()),
            Cell::from(r.inputs.as_str()),
            r.lhs.into(),
            r.rhs.into(),
            r.tolerance.into(),
            r.pass.into(),
            r.elapsed_s.into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Sweep,
    Mass,
    Symmetry,
    Scaling,
    StableLimit,
    Fourier,
    Chapman,
    Bounds,
    Reduction,
    Consistency,
    Spot,
    Subordinator,
    McHarmonic,
    McGreen0,
}

impl Suite {
    /// Suites run by a bare `check`: every deterministic kernel identity.
    pub const DEFAULT: [Suite; 11] = [
        Suite::Sweep,
        Suite::Mass,
        Suite::Symmetry,
        Suite::Scaling,
        Suite::StableLimit,
        Suite::Fourier,
        Suite::Chapman,
        Suite::Bounds,
        Suite::Reduction,
        Suite::Consistency,
        Suite::Spot,
    ];

    /// Every suite, including the sampling ones.
    pub const ALL: [Suite; 14] = [
        Suite::Sweep,
        Suite::Mass,
        Suite::Symmetry,
        Suite::Scaling,
        Suite::StableLimit,
        Suite::Fourier,
        Suite::Chapman,
        Suite::Bounds,
        Suite::Reduction,
        Suite::Consistency,
        Suite::Spot,
        Suite::Subordinator,
        Suite::McHarmonic,
        Suite::McGreen0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Sweep => "sweep",
            Suite::Mass => "mass",
            Suite::Symmetry => "symmetry",
            Suite::Scaling => "scaling",
            Suite::StableLimit => "stable-limit",
            Suite::Fourier => "fourier",
            Suite::Chapman => "chapman",
            Suite::Bounds => "bounds",
            Suite::Reduction => "reduction",
            Suite::Consistency => "consistency",
            Suite::Spot => "spot",
            Suite::Subordinator => "subordinator",
            Suite::McHarmonic => "mc-harmonic",
            Suite::McGreen0 => "mc-green0",
        }
    }

    /// Parses a comma-separated list; `default` and `all` expand to groups.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            match item {
                "default" => out.extend(Suite::DEFAULT),
                "all" => out.extend(Suite::ALL),
                name => out.push(
                    Suite::ALL
                        .into_iter()
                        .find(|s| s.name() == name)
                        .ok_or_else(|| {
                            let known: Vec<_> = Suite::ALL.iter().map(Suite::name).collect();
                            Error::Config(format!(
                                "unknown suite '{name}'; known suites: {}",
                                known.join(", ")
                            ))
                        })?,
                ),
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|s| seen.insert(*s));
        Ok(out)
    }
}

/// Parameter grid for the identity suites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckGrid {
    pub alphas: Vec<f64>,
    pub masses: Vec<f64>,
    pub dims: Vec<usize>,
    /// Values used for `x_d`, `|u_d|` and `y_d`.
    pub coords: Vec<f64>,
}

impl Default for CheckGrid {
    fn default() -> Self {
        Self {
            alphas: vec![0.5, 1.0, 1.5],
            masses: vec![0.5, 1.0, 2.0],
            dims: vec![1, 2, 3],
            coords: vec![0.25, 1.0, 4.0],
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| Error::Config(format!("grid key '{key}': cannot parse '{v}'")))
        })
        .collect()
}

impl CheckGrid {
    /// Grid from `key = v1, v2, ...` lines with keys `alpha`, `m`, `d`,
    /// `coords`; missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut grid = Self::default();
        for (key, value) in super::config::parse_key_values(text)? {
            match key.as_str() {
                "alpha" => grid.alphas = parse_list(&key, &value)?,
                "m" => grid.masses = parse_list(&key, &value)?,
                "d" => grid.dims = parse_list(&key, &value)?,
                "coords" => grid.coords = parse_list(&key, &value)?,
                other => {
                    return Err(Error::Config(format!(
                        "unknown grid key '{other}' (expected alpha, m, d, coords)"
                    )))
                }
            }
        }
        grid.validate()?;
        Ok(grid)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read grid file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for &a in &self.alphas {
            ProcessParams::new(a, 1.0, 1)?;
        }
        for &m in &self.masses {
            ProcessParams::new(1.0, m, 1)?;
        }
        if self.dims.iter().any(|&d| !(1..=3).contains(&d)) {
            return Err(Error::Config("grid dimensions must lie in 1..=3".into()));
        }
        if self.coords.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::Config("grid coordinates must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub grid: CheckGrid,
    /// Multiplies every Poisson-kernel value entering the sweep, mass and
    /// consistency checks; `1` in normal use, a test hook otherwise.
    pub poisson_constant_scale: f64,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            grid: CheckGrid::default(),
            poisson_constant_scale: 1.0,
            seed: 20_240_501,
        }
    }
}

pub fn run_check(suites: &[Suite], opts: &CheckOptions) -> Vec<CheckReport> {
    suites.iter().flat_map(|s| run_suite(*s, opts)).collect()
}

pub fn run_suite(suite: Suite, opts: &CheckOptions) -> Vec<CheckReport> {
    match suite {
        Suite::Sweep => sweep(opts),
        Suite::Mass => mass(opts),
        Suite::Symmetry => symmetry(opts),
        Suite::Scaling => scaling(opts),
        Suite::StableLimit => stable_limit(opts),
        Suite::Fourier => fourier(opts),
        Suite::Chapman => chapman(opts),
        Suite::Bounds => bounds(opts),
        Suite::Reduction => reduction(opts),
        Suite::Consistency => consistency(opts),
        Suite::Spot => spot(opts),
        Suite::Subordinator => subordinator(opts),
        Suite::McHarmonic => mc_harmonic(opts),
        Suite::McGreen0 => mc_green0(opts),
    }
}

fn rng_for(opts: &CheckOptions, suite: Suite) -> RngStream {
    RngStream::new(opts.seed, suite as u64)
}

fn fmt_point(p: &HalfSpacePoint) -> String {
    let parts: Vec<String> = p.coords().iter().map(|c| format!("{c}")).collect();
    format!("({})", parts.join(";"))
}

fn random_interior<R: Rng>(rng: &mut R, d: usize, lo: f64, hi: f64) -> HalfSpacePoint {
    let mut c: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
    c.push(rng.gen_range(lo..hi));
    HalfSpacePoint::new(c).expect("finite coordinates")
}

fn random_exterior<R: Rng>(rng: &mut R, d: usize, lo: f64, hi: f64) -> HalfSpacePoint {
    let mut c: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
    c.push(-rng.gen_range(lo..hi));
    HalfSpacePoint::new(c).expect("finite coordinates")
}

const SWEEP_TOL: f64 = 1e-6;
const MASS_TOL: f64 = 1e-6;
const CONSISTENCY_TOL: f64 = 1e-6;
const SYMMETRY_TOL: f64 = 1e-12;
const SCALING_TOL: f64 = 1e-10;
const REDUCTION_TOL: f64 = 1e-10;
const CAUCHY_TOL: f64 = 1e-8;
const FFT_TOL: f64 = 1e-6;
const CHAPMAN_TOL: f64 = 1e-5;
const STABLE_TOL: f64 = 1e-3;
const SPOT_TOL: f64 = 1e-3;
const MC_SIGMAS: f64 = 3.0;
/// Grid-monitoring allowance for the discounted harmonic measure.
pub const HARMONIC_DISCRETIZATION: f64 = 0.02;
/// Two-sided band for `G^0 / (G + x ^ y)`.
pub const GREEN0_RATIO_BAND: f64 = 5.0;

/// `int_{-inf}^0 P(x,u) U(u-y) du / U(x-y)` at `m = 1`, `d = 1`.
fn sweep(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for &a in &opts.grid.alphas {
        let p = ProcessParams::new(a, 1.0, 1).expect("validated grid");
        for &x in &opts.grid.coords {
            for &yc in &opts.grid.coords {
                let y = -yc;
                out.push(check(
                    "sweep",
                    format!("alpha={a} m=1 d=1 x={x} y={y}"),
                    1.0,
                    SWEEP_TOL,
                    || {
                        Ok(opts.poisson_constant_scale * sweep_integral(x, y, &p)?
                            / potential_m(&[x - y], &p)?)
                    },
                ));
            }
        }
    }
    out
}

/// `int_{H^c} P(x,u) du / E^x e^{-m tau}` for every dimension in the grid.
fn mass(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for &d in &opts.grid.dims {
        for &a in &opts.grid.alphas {
            for &m in &opts.grid.masses {
                let p = ProcessParams::new(a, m, d).expect("validated grid");
                for &xd in &opts.grid.coords {
                    let x = HalfSpacePoint::on_axis(d, xd).expect("finite");
                    out.push(check(
                        "mass",
                        format!("alpha={a} m={m} d={d} x_d={xd}"),
                        1.0,
                        MASS_TOL,
                        || {
                            Ok(opts.poisson_constant_scale * poisson_mass(&x, &p)?
                                / exit_discount_m(xd, &p)?)
                        },
                    ));
                }
            }
        }
    }
    out
}

/// `U(x-y) - int P(x,u) U(u-y) du = G(x,y)` for `x, y > 0`, `d = 1`, `m = 1`.
fn consistency(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for &a in &opts.grid.alphas {
        let p = ProcessParams::new(a, 1.0, 1).expect("validated grid");
        for &x in &opts.grid.coords {
            for &y in &opts.grid.coords {
                if x == y && a <= 1.0 {
                    continue;
                }
                out.push(check(
                    "consistency",
                    format!("alpha={a} m=1 d=1 x={x} y={y}"),
                    1.0,
                    CONSISTENCY_TOL,
                    || {
                        let u = potential_m(&[x - y], &p)?;
                        let swept = u - green_compensator(x, y, &p)?;
                        Ok((u - opts.poisson_constant_scale * swept) / green_1d(x, y, &p)?)
                    },
                ));
            }
        }
    }
    out
}

/// `G(x,y) = G(y,x)` on random pairs.
fn symmetry(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut rng = rng_for(opts, Suite::Symmetry);
    let g = &opts.grid;
    (0..50)
        .map(|_| {
            let a = g.alphas[rng.gen_range(0..g.alphas.len())];
            let m = g.masses[rng.gen_range(0..g.masses.len())];
            let d = g.dims[rng.gen_range(0..g.dims.len())];
            let p = ProcessParams::new(a, m, d).expect("validated grid");
            let x = random_interior(&mut rng, d, 0.05, 5.0);
            let y = random_interior(&mut rng, d, 0.05, 5.0);
            check(
                "symmetry",
                format!(
                    "alpha={a} m={m} d={d} x={} y={}",
                    fmt_point(&x),
                    fmt_point(&y)
                ),
                1.0,
                SYMMETRY_TOL,
                || Ok(green_halfspace(&x, &y, &p)? / green_halfspace(&y, &x, &p)?),
            )
        })
        .collect()
}

/// `P^m(x,u) = m^{d/a} P^1(kx, ku)` and `G^m(x,y) = m^{(d-a)/a} G^1(kx, ky)`.
fn scaling(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut rng = rng_for(opts, Suite::Scaling);
    let g = &opts.grid;
    let mut out = Vec::new();
    for &m in &[0.5, 2.0, 5.0] {
        for i in 0..20 {
            let a = g.alphas[i % g.alphas.len()];
            let d = g.dims[(i / g.alphas.len()) % g.dims.len()];
            let p = ProcessParams::new(a, m, d).expect("validated grid");
            let p1 = p.with_m(1.0).expect("valid");
            let k = p.kappa();
            let dim = d as f64;
            let x = random_interior(&mut rng, d, 0.05, 4.0);
            let y = random_interior(&mut rng, d, 0.05, 4.0);
            let u = random_exterior(&mut rng, d, 0.05, 4.0);
            let tag = format!("alpha={a} m={m} d={d} x={} ", fmt_point(&x));
            out.push(check(
                "scaling-poisson",
                format!("{tag}u={}", fmt_point(&u)),
                1.0,
                SCALING_TOL,
                || {
                    Ok(poisson_halfspace(&x, &u, &p)?
                        / (m.powf(dim / a) * poisson_halfspace(&x.scaled(k), &u.scaled(k), &p1)?))
                },
            ));
            out.push(check(
                "scaling-green",
                format!("{tag}y={}", fmt_point(&y)),
                1.0,
                SCALING_TOL,
                || {
                    Ok(green_halfspace(&x, &y, &p)?
                        / (m.powf((dim - a) / a)
                            * green_halfspace(&x.scaled(k), &y.scaled(k), &p1)?))
                },
            ));
        }
    }
    out
}

/// The `d`-dimensional formulas at `d = 1` against the half-line ones.
fn reduction(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut rng = rng_for(opts, Suite::Reduction);
    let mut out = Vec::new();
    for _ in 0..50 {
        let a = rng.gen_range(0.1..1.9);
        let m = rng.gen_range(0.25..4.0);
        let p = ProcessParams::new(a, m, 1).expect("valid");
        let x = rng.gen_range(0.05..5.0);
        let y = rng.gen_range(0.05..5.0);
        let u = -rng.gen_range(0.05..5.0);
        let (xp, yp, up) = (
            HalfSpacePoint::new(vec![x]).expect("finite"),
            HalfSpacePoint::new(vec![y]).expect("finite"),
            HalfSpacePoint::new(vec![u]).expect("finite"),
        );
        out.push(check(
            "reduction-poisson",
            format!("alpha={a} m={m} x={x} u={u}"),
            1.0,
            REDUCTION_TOL,
            || Ok((ln_poisson_halfspace(&xp, &up, &p)? - ln_poisson_1d(x, u, &p)?).exp()),
        ));
        out.push(check(
            "reduction-green",
            format!("alpha={a} m={m} x={x} y={y}"),
            1.0,
            REDUCTION_TOL,
            || Ok((ln_green_halfspace(&xp, &yp, &p)? - ln_green_1d(x, y, &p)?).exp()),
        ));
    }
    out
}

/// Subordination against the closed Cauchy density, and FFT inversion of
/// the characteristic function against subordination.
fn fourier(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut rng = rng_for(opts, Suite::Fourier);
    let g = &opts.grid;
    let mut out = Vec::new();
    for i in 0..20 {
        let m = g.masses[i % g.masses.len()];
        let d = g.dims[(i / g.masses.len()) % g.dims.len()];
        let p = ProcessParams::new(1.0, m, d).expect("validated grid");
        let t = rng.gen_range(0.1..5.0);
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        out.push(check(
            "fourier-cauchy",
            format!("alpha=1 m={m} d={d} t={t} x={x:?}"),
            1.0,
            CAUCHY_TOL,
            || Ok(density_via_subordination(t, &x, &p)? / cauchy_density(t, &x, &p)?),
        ));
    }
    for &a in &g.alphas {
        for &m in &g.masses {
            let p = ProcessParams::new(a, m, 1).expect("validated grid");
            let t = 1.0;
            let grid = FourierGrid::for_density(t, &p);
            let inverted = invert_density(t, &p, grid);
            for &c in &[0.0, 0.5, 1.0, 2.0] {
                out.push(match &inverted {
                    Ok(dens) => {
                        let k = (c / (p.kappa() * dens.dx)).round() as i64;
                        let j = dens.index_of(k).expect("grid covers the point");
                        let xj = dens.x(j);
                        check(
                            "fourier-fft",
                            format!("alpha={a} m={m} d=1 t={t} x={xj}"),
                            1.0,
                            FFT_TOL,
                            || Ok(dens.values[j] / density_via_subordination(t, &[xj], &p)?),
                        )
                    }
                    Err(e) => check(
                        "fourier-fft",
                        format!("alpha={a} m={m} d=1 t={t}"),
                        1.0,
                        FFT_TOL,
                        || Err(e.clone()),
                    ),
                });
            }
        }
    }
    out
}

/// `int p_s(x-z) p_t(z) dz = p_{s+t}(x)` in `d = 1`, the convolution taken
/// over FFT-inverted densities.
fn chapman(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let (s, t) = (0.5, 1.0);
    for &a in &opts.grid.alphas {
        for &m in &opts.grid.masses {
            let p = ProcessParams::new(a, m, 1).expect("validated grid");
            let grid = FourierGrid::for_density(s, &p);
            let pair =
                invert_density(s, &p, grid).and_then(|ps| Ok((ps, invert_density(t, &p, grid)?)));
            for &c in &[0.0, 0.5, 1.0, 2.0] {
                let inputs = format!("alpha={a} m={m} d=1 s={s} t={t} x={c}/kappa");
                out.push(check("chapman", inputs, 1.0, CHAPMAN_TOL, || {
                    let (ps, pt) = pair.as_ref().map_err(Clone::clone)?;
                    let n = ps.values.len() as i64;
                    let k = (c / (p.kappa() * ps.dx)).round() as i64;
                    let x = k as f64 * ps.dx;
                    // grid indices wrap: the densities are negligible beyond half a period
                    let conv: f64 = (0..n)
                        .map(|j| {
                            let jz = j - n / 2;
                            let diff = (k - jz).rem_euclid(n);
                            let diff = if diff >= n / 2 { diff - n } else { diff };
                            ps.values[(diff + n / 2) as usize] * pt.values[j as usize]
                        })
                        .sum::<f64>()
                        * ps.dx;
                    Ok(conv / density_via_subordination(s + t, &[x], &p)?)
                }));
            }
        }
    }
    out
}

/// Explicit lower bound for `G` at `m = 1`, `d = 2`, `alpha = 1` on 100
/// pairs with `|x - y| <= 1`; `lhs` is the relative deficit.
fn bounds(_opts: &CheckOptions) -> Vec<CheckReport> {
    let p = ProcessParams::new(1.0, 1.0, 2).expect("valid");
    let depths = [0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.5, 4.0];
    let offsets = [
        (0.05, 0.3),
        (0.1, 1.2),
        (0.2, 2.0),
        (0.3, -0.4),
        (0.45, 0.9),
        (0.6, -1.3),
        (0.7, 2.8),
        (0.8, 0.0),
        (0.9, -2.2),
        (1.0, 1.57),
    ];
    let mut out = Vec::new();
    for &xd in &depths {
        for &(r, phi) in &offsets {
            let (dx, dy): (f64, f64) = (r * f64::cos(phi), r * f64::sin(phi));
            let mut yd = xd + dy;
            if yd <= 0.01 {
                yd = xd + dy.abs();
            }
            let x = HalfSpacePoint::new(vec![0.0, xd]).expect("finite");
            let y = HalfSpacePoint::new(vec![dx, yd]).expect("finite");
            out.push(check(
                "green-lower-bound",
                format!("alpha=1 m=1 d=2 x={} y={}", fmt_point(&x), fmt_point(&y)),
                0.0,
                0.0,
                || {
                    let bound = green_lower_bound(&x, &y, 1.0, 2)?;
                    let g = green_halfspace(&x, &y, &p)?;
                    Ok((bound - g).max(0.0) / bound)
                },
            ));
        }
    }
    out
}

/// `G^m / shape` and `P^m |x-u|^d (-u_d/x_d)^{a/2}` at `m = 1e-5` are constant
/// over point pairs; the extrapolated limits agree with constant times shape.
fn stable_limit(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut rng = rng_for(opts, Suite::StableLimit);
    let m = 1e-5;
    let mut out = Vec::new();
    for &d in &[1usize, 2] {
        for &a in &opts.grid.alphas {
            let p = ProcessParams::new(a, m, d).expect("valid");
            let pairs: Vec<_> = (0..20)
                .map(|_| {
                    let x = random_interior(&mut rng, d, 0.2, 2.0);
                    let mut y = random_interior(&mut rng, d, 0.2, 2.0);
                    if x.distance(&y) < 0.1 {
                        y = y.scaled(1.5);
                    }
                    (x, y, random_exterior(&mut rng, d, 0.2, 2.0))
                })
                .collect();
            let green_ratio = |x: &HalfSpacePoint, y: &HalfSpacePoint| -> Result<f64> {
                Ok(green_halfspace(x, y, &p)? / stable_green_shape(x, y, a)?)
            };
            let poisson_ratio = |x: &HalfSpacePoint, u: &HalfSpacePoint| -> Result<f64> {
                Ok(poisson_halfspace(x, u, &p)? / stable_poisson_shape(x, u, a)?)
            };
            let (x0, y0, u0) = &pairs[0];
            let g_ref = green_ratio(x0, y0);
            let p_ref = poisson_ratio(x0, u0);
            for (i, (x, y, u)) in pairs.iter().enumerate() {
                let tag = format!("alpha={a} m={m} d={d} pair={i}");
                out.push(check(
                    "stable-green-constancy",
                    format!("{tag} x={} y={}", fmt_point(x), fmt_point(y)),
                    1.0,
                    STABLE_TOL,
                    || Ok(green_ratio(x, y)? / g_ref.clone()?),
                ));
                out.push(check(
                    "stable-poisson-constancy",
                    format!("{tag} x={} u={}", fmt_point(x), fmt_point(u)),
                    1.0,
                    STABLE_TOL,
                    || Ok(poisson_ratio(x, u)? / p_ref.clone()?),
                ));
            }
            let (x, y, u) = &pairs[1];
            out.push(check(
                "stable-green-routes",
                format!("alpha={a} d={d}"),
                1.0,
                STABLE_TOL,
                || {
                    Ok(stable_limit_green(x, y, a, d)?
                        / (crate::kernels::stable_green_constant(a, d)
                            * stable_green_shape(x, y, a)?))
                },
            ));
            out.push(check(
                "stable-poisson-routes",
                format!("alpha={a} d={d}"),
                1.0,
                STABLE_TOL,
                || {
                    Ok(stable_limit_poisson(x, u, a, d)?
                        / (crate::kernels::stable_poisson_constant(a, d)
                            * stable_poisson_shape(x, u, a)?))
                },
            ));
        }
    }
    out
}

/// `(1/pi) int_0^{asinh(sqrt(4xy)/|x-y|)} e^{-|x-y| cosh th} dth`, the
/// `alpha = 1`, `m = 1` Green function of `(0, inf)`, by composite Simpson
/// with 2000 panels.
pub fn green_1d_cauchy_oracle(x: f64, y: f64) -> f64 {
    let delta = (x - y).abs();
    let upper = ((4.0 * x * y).sqrt() / delta).asinh();
    let n = 2000;
    let h = upper / n as f64;
    let f = |th: f64| (-delta * th.cosh()).exp();
    let mut sum = f(0.0) + f(upper);
    for i in 1..n {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0 / std::f64::consts::PI
}

fn spot(_opts: &CheckOptions) -> Vec<CheckReport> {
    let p = ProcessParams::new(1.0, 1.0, 1).expect("valid");
    vec![
        check(
            "spot-green-1d",
            "alpha=1 m=1 x=1 y=2 vs Simpson".into(),
            green_1d_cauchy_oracle(1.0, 2.0),
            SPOT_TOL,
            || green_1d(1.0, 2.0, &p),
        ),
        check(
            "spot-exit-discount",
            "alpha=1 z=1 vs erfc(1)".into(),
            libm::erfc(1.0),
            1e-12,
            || exit_discount(1.0, 1.0),
        ),
        check(
            "spot-poisson-1d",
            "alpha=1 m=1 x=1 u=-1 vs e^-2/2pi".into(),
            (-2f64).exp() / (2.0 * std::f64::consts::PI),
            1e-14,
            || poisson_1d(1.0, -1.0, &p),
        ),
    ]
}

fn z_score(mean: f64, stderr: f64, target: f64) -> f64 {
    if mean == target {
        0.0
    } else {
        (mean - target) / stderr
    }
}

/// Laplace transform of the tempered increment at five `lambda` and the
/// acceptance rate of the rejection step, each as a z-score.
fn subordinator(opts: &CheckOptions) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let draws = 1_000_000u64;
    let (t, m, a) = (1.0, 1.0, 1.0);
    let p = ProcessParams::new(a, m, 1).expect("valid");
    let lambdas = [0.25, 0.5, 1.0, 3.0, 8.0];
    let start = Instant::now();
    let samples: Result<Vec<f64>> = TemperedSampler::new(t, &p).map(|s| {
        let mut rng = rng_for(opts, Suite::Subordinator);
        (0..draws).map(|_| s.sample(&mut rng)).collect()
    });
    let elapsed = start.elapsed().as_secs_f64();
    for &lam in &lambdas {
        let target = (m * t - t * (lam + p.tilt()).powf(0.5 * a)).exp();
        let inputs = format!("alpha={a} m={m} t={t} lambda={lam} draws={draws}");
        let mut r = check("subordinator-laplace", inputs, 0.0, MC_SIGMAS, || {
            let v = samples.as_ref().map_err(Clone::clone)?;
            let (s1, s2) = v.iter().fold((0.0, 0.0), |(s1, s2), &x| {
                let w = (-lam * x).exp();
                (s1 + w, s2 + w * w)
            });
            let n = draws as f64;
            let mean = s1 / n;
            let sd = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0).sqrt();
            Ok(z_score(mean, sd / n.sqrt(), target))
        });
        r.elapsed_s += elapsed / lambdas.len() as f64;
        out.push(r);
    }
    let t_acc = 0.1;
    out.push(check(
        "subordinator-acceptance",
        format!("alpha={a} m={m} t={t_acc} proposals={draws}"),
        0.0,
        MC_SIGMAS,
        || {
            let s = TemperedSampler::new(t_acc, &p)?;
            let mut rng = RngStream::new(opts.seed, Suite::Subordinator as u64 + 1000);
            let accepted = (0..draws).filter(|_| s.propose(&mut rng).is_some()).count() as f64;
            let n = draws as f64;
            let rate = accepted / n;
            let target = (-m * t_acc).exp();
            Ok(z_score(rate, (target * (1.0 - target) / n).sqrt(), target))
        },
    ));
    out
}

/// Path configuration of the harmonic-measure experiment.
pub fn harmonic_config(seed: u64) -> PathConfig {
    PathConfig {
        dt: 1e-3,
        horizon: 20.0,
        n_paths: 100_000,
        seed,
        ..PathConfig::default()
    }
}

/// Discounted harmonic measure of the whole complement at `x = 1`, `d = 1`,
/// `alpha = 1` against `exit_discount`, within `3 stderr + 2%`, plus a
/// reproducibility check across worker counts.
fn mc_harmonic(opts: &CheckOptions) -> Vec<CheckReport> {
    let p = ProcessParams::new(1.0, 1.0, 1).expect("valid");
    let x = HalfSpacePoint::on_axis(1, 1.0).expect("finite");
    let region = ExteriorBox::complement(1);
    let target = exit_discount(1.0, 1.0).unwrap_or(f64::NAN);
    let cfg = harmonic_config(opts.seed);
    let start = Instant::now();
    let est = estimate_harmonic_measure(&x, &region, &p, &cfg);
    let elapsed = start.elapsed().as_secs_f64();
    let mut out = vec![match est {
        Ok(e) => CheckReport::new(
            "mc-harmonic",
            format!(
                "alpha=1 m=1 d=1 x=1 dt={} paths={} stderr={:.3e}",
                cfg.dt, cfg.n_paths, e.stderr
            ),
            e.mean,
            target,
            MC_SIGMAS * e.stderr + HARMONIC_DISCRETIZATION * target,
            elapsed,
        ),
        Err(e) => check(
            "mc-harmonic",
            "alpha=1 m=1 d=1 x=1".into(),
            target,
            0.0,
            || Err(e),
        ),
    }];
    let small = PathConfig {
        n_paths: 4096,
        ..cfg
    };
    out.push(check(
        "mc-harmonic-determinism",
        "same seed, 1 and 4 workers, 4096 paths".into(),
        0.0,
        0.0,
        || {
            let a = estimate_harmonic_measure(
                &x,
                &region,
                &p,
                &PathConfig {
                    workers: Some(1),
                    ..small.clone()
                },
            )?;
            let b = estimate_harmonic_measure(
                &x,
                &region,
                &p,
                &PathConfig {
                    workers: Some(4),
                    ..small.clone()
                },
            )?;
            Ok(if a == b { 0.0 } else { 1.0 })
        },
    ));
    out
}

/// Path configuration of the undiscounted Green-function experiment.
pub fn green0_config(seed: u64) -> PathConfig {
    PathConfig {
        dt: 1e-2,
        horizon: 200.0,
        n_paths: 10_000,
        seed,
        ..PathConfig::default()
    }
}

/// Pairs `(x, y)` of the undiscounted Green-function experiment.
pub const GREEN0_PAIRS: [(f64, f64); 5] =
    [(0.25, 1.0), (0.5, 1.0), (1.0, 2.0), (2.0, 3.0), (3.0, 3.5)];

/// Undiscounted Green function in `d = 1`, `alpha = 1`: lower bound
/// `(2/alpha) x ^ y` up to three standard errors, and two-sided comparison
/// with `G + x ^ y`.
fn mc_green0(opts: &CheckOptions) -> Vec<CheckReport> {
    let a = 1.0;
    let p = ProcessParams::new(a, 1.0, 1).expect("valid");
    let mut out = Vec::new();
    for (i, &(x, y)) in GREEN0_PAIRS.iter().enumerate() {
        let cfg = PathConfig {
            stream: 1_000_000 * (i as u64 + 1),
            ..green0_config(opts.seed)
        };
        let xp = HalfSpacePoint::on_axis(1, x).expect("finite");
        let yp = HalfSpacePoint::on_axis(1, y).expect("finite");
        let start = Instant::now();
        let est = Ball::new(yp.clone(), Ball::DEFAULT_RADIUS)
            .and_then(|ball| estimate_green0(&xp, &ball, &p, &cfg));
        let elapsed = start.elapsed().as_secs_f64();
        let inputs = format!(
            "alpha={a} m=1 d=1 x={x} y={y} dt={} horizon={} paths={}",
            cfg.dt, cfg.horizon, cfg.n_paths
        );
        let est = match est {
            Ok(e) => e,
            Err(e) => {
                out.push(check("mc-green0-lower", inputs, 0.0, 0.0, || Err(e)));
                continue;
            }
        };
        let tail = format!(
            " mean={:.6} stderr={:.3e} tail=[{:.4},{:.4}]",
            est.mean, est.stderr, est.tail_lower, est.tail_upper
        );
        let lower = (2.0 / a) * brownian_green_halfspace(&xp, &yp).unwrap_or(f64::NAN);
        let mut r = check(
            "mc-green0-lower",
            format!("{inputs}{tail} bound={lower:.6}"),
            0.0,
            0.0,
            || Ok((lower - (est.mean + MC_SIGMAS * est.stderr)).max(0.0) / lower),
        );
        r.elapsed_s = elapsed;
        out.push(r);
        let reference = green_1d(x, y, &p).map(|g| g + x.min(y));
        out.push(check(
            "mc-green0-ratio",
            format!("{inputs}{tail}"),
            0.0,
            GREEN0_RATIO_BAND.ln(),
            || Ok((est.mean / reference.clone()?).ln()),
        ));
    }
    out
}
