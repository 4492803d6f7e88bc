//! Monte Carlo experiments paired with their analytic targets.

use super::table::{Cell, Table};
use crate::error::{Error, Result};
use crate::kernels::{
    brownian_green_halfspace, exit_discount_m, green_halfspace, poisson_halfspace, HalfSpacePoint,
    ProcessParams,
};
use crate::mc::{
    estimate_green0, estimate_green1, estimate_harmonic_measure, estimate_interval_exit,
    estimate_survival_curve, Ball, DiscretizationNote, Estimate, ExteriorBox, PathConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Harmonic,
    Survival,
    Green1,
    Green0,
    IntervalExit,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Harmonic,
        Experiment::Survival,
        Experiment::Green1,
        Experiment::Green0,
        Experiment::IntervalExit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Harmonic => "harmonic",
            Experiment::Survival => "survival",
            Experiment::Green1 => "green1",
            Experiment::Green0 => "green0",
            Experiment::IntervalExit => "interval-exit",
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Experiment::ALL.iter().map(Experiment::name).collect();
                Error::Config(format!(
                    "unknown experiment '{s}'; known experiments: {}",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRequest {
    pub experiment: Experiment,
    pub params: ProcessParams,
    pub paths: PathConfig,
    /// Start point (interior; for `interval-exit` the single coordinate in `(0, 1)`).
    pub x: Vec<f64>,
    /// Ball centre for the Green experiments.
    pub y: Option<Vec<f64>>,
    /// Centre of a small exterior cube for `harmonic`; the whole complement if absent.
    pub u: Option<Vec<f64>>,
    /// Half-width of the exterior cube.
    pub h: f64,
    pub radius: f64,
    /// Times for `survival`.
    pub t: Vec<f64>,
}

impl McRequest {
    pub fn new(
        experiment: Experiment,
        params: ProcessParams,
        paths: PathConfig,
        x: Vec<f64>,
    ) -> Self {
        Self {
            experiment,
            params,
            paths,
            x,
            y: None,
            u: None,
            h: 0.1,
            radius: Ball::DEFAULT_RADIUS,
            t: Vec::new(),
        }
    }
}

pub const MC_COLUMNS: [&str; 11] = [
    "experiment",
    "alpha",
    "m",
    "d",
    "inputs",
    "mean",
    "stderr",
    "n",
    "target",
    "target_kind",
    "z_score",
];

fn note_text(n: DiscretizationNote) -> &'static str {
    match n {
        DiscretizationNote::None => "none",
        DiscretizationNote::ExitTimeBiasedUp => "exit_time_biased_up",
    }
}

fn row(
    req: &McRequest,
    inputs: String,
    est: &Estimate,
    target: Option<f64>,
    kind: &str,
    exact: bool,
) -> Vec<Cell> {
    let p = &req.params;
    let z = if exact {
        target.map(|t| est.z_score(t))
    } else {
        None
    };
    vec![
        req.experiment.name().into(),
        p.alpha().into(),
        p.m().into(),
        p.d().into(),
        format!("{inputs} note={}", note_text(est.discretization_note)).into(),
        est.mean.into(),
        est.stderr.into(),
        est.n.into(),
        target.into(),
        kind.into(),
        z.into(),
    ]
}

fn point(name: &str, coords: &[f64], d: usize) -> Result<HalfSpacePoint> {
    if coords.len() != d {
        return Err(Error::Config(format!(
            "--{name} has {} coordinates but d = {d}",
            coords.len()
        )));
    }
    HalfSpacePoint::new(coords.to_vec()).map_err(|e| Error::Config(format!("--{name}: {e}")))
}

fn interior(name: &str, coords: &[f64], d: usize) -> Result<HalfSpacePoint> {
    let p = point(name, coords, d)?;
    if p.boundary_distance() <= 0.0 {
        return Err(Error::Config(format!(
            "--{name} must be interior (last coordinate > 0)"
        )));
    }
    Ok(p)
}

fn paths_tag(cfg: &PathConfig) -> String {
    format!(
        "dt={} horizon={} paths={} seed={}",
        cfg.dt, cfg.horizon, cfg.n_paths, cfg.seed
    )
}

/// Runs one experiment. Every row pairs the estimate with its analytic
/// counterpart; `z_score` is filled only where the target is the exact
/// expectation of the estimator.
pub fn run_mc(req: &McRequest) -> Result<Table> {
    req.paths.validate()?;
    let p = &req.params;
    let d = p.d();
    let cfg = &req.paths;
    let mut table = Table::new(MC_COLUMNS);
    match req.experiment {
        Experiment::Harmonic => {
            let x = interior("x", &req.x, d)?;
            match &req.u {
                None => {
                    let est = estimate_harmonic_measure(&x, &ExteriorBox::complement(d), p, cfg)?;
                    let target = exit_discount_m(x.boundary_distance(), p)?;
                    let inputs = format!("x={:?} region=complement {}", x.coords(), paths_tag(cfg));
                    table.push(row(req, inputs, &est, Some(target), "exit_discount", true));
                }
                Some(u) => {
                    let u = point("u", u, d)?;
                    if !(req.h > 0.0) || u.boundary_distance() + req.h > 0.0 {
                        return Err(Error::Config(
                            "the cube around --u must lie in u_d <= 0 (need u_d + h <= 0)".into(),
                        ));
                    }
                    let region = ExteriorBox::around(&u, req.h);
                    let est = estimate_harmonic_measure(&x, &region, p, cfg)?;
                    let density = Estimate {
                        mean: est.mean / region.volume(),
                        stderr: est.stderr / region.volume(),
                        ..est
                    };
                    let target = poisson_halfspace(&x, &u, p)?;
                    let inputs = format!(
                        "x={:?} u={:?} h={} {}",
                        x.coords(),
                        u.coords(),
                        req.h,
                        paths_tag(cfg)
                    );
                    table.push(row(
                        req,
                        inputs,
                        &density,
                        Some(target),
                        "poisson_at_center",
                        false,
                    ));
                }
            }
        }
        Experiment::Survival => {
            let x = interior("x", &req.x, d)?;
            if req.t.is_empty() {
                return Err(Error::Config("survival needs at least one --t".into()));
            }
            let ests = estimate_survival_curve(&x, &req.t, p, cfg)?;
            for (t, est) in req.t.iter().zip(&ests) {
                let inputs = format!("x={:?} t={t} {}", x.coords(), paths_tag(cfg));
                table.push(row(req, inputs, est, None, "", false));
            }
        }
        Experiment::Green1 => {
            let x = interior("x", &req.x, d)?;
            let y = interior(
                "y",
                req.y
                    .as_deref()
                    .ok_or_else(|| Error::Config("green1 needs --y".into()))?,
                d,
            )?;
            let ball =
                Ball::new(y.clone(), req.radius).map_err(|e| Error::Config(e.to_string()))?;
            let est = estimate_green1(&x, &ball, p, cfg)?;
            let target = green_halfspace(&x, &y, p)?;
            let inputs = format!(
                "x={:?} y={:?} radius={} {}",
                x.coords(),
                y.coords(),
                req.radius,
                paths_tag(cfg)
            );
            table.push(row(
                req,
                inputs,
                &est,
                Some(target),
                "green_at_center",
                false,
            ));
        }
        Experiment::Green0 => {
            let x = interior("x", &req.x, d)?;
            let y = interior(
                "y",
                req.y
                    .as_deref()
                    .ok_or_else(|| Error::Config("green0 needs --y".into()))?,
                d,
            )?;
            let ball =
                Ball::new(y.clone(), req.radius).map_err(|e| Error::Config(e.to_string()))?;
            let g0 = estimate_green0(&x, &ball, p, cfg)?;
            let est = Estimate {
                mean: g0.mean,
                stderr: g0.stderr,
                ..g0.truncated
            };
            let lower = 2.0 / p.alpha() * brownian_green_halfspace(&x, &y)?;
            let inputs = format!(
                "x={:?} y={:?} radius={} truncated={:.10} tail_lower={:.10} tail_upper={:.10} {}",
                x.coords(),
                y.coords(),
                req.radius,
                g0.truncated.mean,
                g0.tail_lower,
                g0.tail_upper,
                paths_tag(cfg)
            );
            table.push(row(
                req,
                inputs,
                &est,
                Some(lower),
                "brownian_lower_bound",
                false,
            ));
        }
        Experiment::IntervalExit => {
            if d != 1 || req.x.len() != 1 {
                return Err(Error::Config(
                    "interval-exit needs d = 1 and a single --x in (0, 1)".into(),
                ));
            }
            let x = req.x[0];
            let est = estimate_interval_exit(x, p, cfg)?;
            let shape = (x * (1.0 - x)).powf(0.5 * p.alpha());
            let inputs = format!("x={x} {}", paths_tag(cfg));
            table.push(row(req, inputs, &est, Some(shape), "order_shape", false));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PathConfig {
        PathConfig {
            dt: 1e-2,
            horizon: 5.0,
            n_paths: 2000,
            seed: 9,
            ..PathConfig::default()
        }
    }

    #[test]
    fn harmonic_row_has_z_score() {
        let p = ProcessParams::new(1.0, 1.0, 1).unwrap();
        let t = run_mc(&McRequest::new(Experiment::Harmonic, p, small(), vec![1.0])).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(matches!(t.rows[0][10], Cell::Num(_)));
    }

    #[test]
    fn seed_repetition_is_bit_identical() {
        let p = ProcessParams::new(1.0, 1.0, 1).unwrap();
        let mut req = McRequest::new(Experiment::Survival, p, small(), vec![0.5]);
        req.t = vec![1.0, 4.0];
        assert_eq!(
            run_mc(&req).unwrap().to_csv().unwrap(),
            run_mc(&req).unwrap().to_csv().unwrap()
        );
    }

    #[test]
    fn config_errors() {
        let p = ProcessParams::new(1.0, 1.0, 1).unwrap();
        assert!(run_mc(&McRequest::new(Experiment::Green1, p, small(), vec![1.0])).is_err());
        assert!(run_mc(&McRequest::new(
            Experiment::IntervalExit,
            p,
            small(),
            vec![1.5]
        ))
        .is_err());
        let mut bad = small();
        bad.dt = 1.0;
        assert!(matches!(
            run_mc(&McRequest::new(Experiment::Harmonic, p, bad, vec![1.0])),
            Err(Error::Config(_))
        ));
    }
}
