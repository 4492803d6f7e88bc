//! Kernel evaluation on grids of points.

use super::table::{Cell, Table};
use crate::error::{Error, Result};
use crate::kernels::{
    brownian_green_halfspace, exit_discount_m, green_lower_bound, ln_density_via_subordination,
    ln_green_halfspace, ln_levy_density, ln_poisson_halfspace, ln_potential_m, stable_limit_green,
    stable_limit_poisson, HalfSpacePoint, KernelValue, ProcessParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Poisson,
    Green,
    ExitDiscount,
    Density,
    Potential,
    Levy,
    GreenLowerBound,
    BrownianGreen,
    StableGreen,
    StablePoisson,
}

impl KernelKind {
    pub const ALL: [KernelKind; 10] = [
        KernelKind::Poisson,
        KernelKind::Green,
        KernelKind::ExitDiscount,
        KernelKind::Density,
        KernelKind::Potential,
        KernelKind::Levy,
        KernelKind::GreenLowerBound,
        KernelKind::BrownianGreen,
        KernelKind::StableGreen,
        KernelKind::StablePoisson,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Poisson => "poisson",
            KernelKind::Green => "green",
            KernelKind::ExitDiscount => "exit-discount",
            KernelKind::Density => "density",
            KernelKind::Potential => "potential",
            KernelKind::Levy => "levy",
            KernelKind::GreenLowerBound => "green-lower-bound",
            KernelKind::BrownianGreen => "brownian-green",
            KernelKind::StableGreen => "stable-green",
            KernelKind::StablePoisson => "stable-poisson",
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = KernelKind::ALL.iter().map(KernelKind::name).collect();
                Error::Config(format!(
                    "unknown kernel '{s}'; known kernels: {}",
                    known.join(", ")
                ))
            })
    }
}

/// One evaluation: the kernel, the process and the grid. Pairs are formed
/// from the cartesian product of the first and second point lists.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRequest {
    pub kernel: KernelKind,
    pub params: ProcessParams,
    pub x: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub t: Vec<f64>,
    pub z: Vec<f64>,
}

impl EvalRequest {
    pub fn new(kernel: KernelKind, params: ProcessParams) -> Self {
        Self {
            kernel,
            params,
            x: Vec::new(),
            u: Vec::new(),
            y: Vec::new(),
            t: Vec::new(),
            z: Vec::new(),
        }
    }
}

fn points(name: &str, list: &[Vec<f64>], d: usize) -> Result<Vec<HalfSpacePoint>> {
    list.iter()
        .map(|c| {
            if c.len() != d {
                return Err(Error::Config(format!(
                    "--{name} {c:?} has {} coordinates but d = {d}",
                    c.len()
                )));
            }
            HalfSpacePoint::new(c.clone()).map_err(|e| Error::Config(format!("--{name}: {e}")))
        })
        .collect()
}

fn coord_columns(name: &str, d: usize) -> Vec<String> {
    if d == 1 {
        vec![name.to_string()]
    } else {
        (1..=d).map(|i| format!("{name}_{i}")).collect()
    }
}

fn coord_cells(p: &HalfSpacePoint) -> impl Iterator<Item = Cell> + '_ {
    p.coords().iter().map(|&c| Cell::Num(c))
}

fn value_cells(v: Result<KernelValue>) -> Result<[Cell; 2]> {
    let v = v?;
    Ok([v.value.into(), v.log_value.into()])
}

/// Evaluates the kernel at every grid point. Domain errors abort the table
/// with a message naming the offending point.
pub fn run_eval(req: &EvalRequest) -> Result<Table> {
    let p = &req.params;
    let d = p.d();
    let mut columns: Vec<String> = vec!["kernel".into(), "alpha".into(), "m".into(), "d".into()];
    let head = |row: &mut Vec<Cell>| {
        row.push(req.kernel.name().into());
        row.push(p.alpha().into());
        row.push(p.m().into());
        row.push(d.into());
    };
    let xs = points("x", &req.x, d)?;
    let with_point_error =
        |e: Error, what: String| Error::Config(format!("{} at {what}: {e}", req.kernel.name()));
    let pair_kernel = |second: &str,
                       list: &[Vec<f64>],
                       f: &dyn Fn(&HalfSpacePoint, &HalfSpacePoint) -> Result<KernelValue>|
     -> Result<Table> {
        let mut cols = columns.clone();
        cols.extend(coord_columns("x", d));
        cols.extend(coord_columns(second, d));
        cols.extend(["value".to_string(), "log_value".to_string()]);
        let mut t = Table::new(cols);
        let seconds = points(second, list, d)?;
        for x in &xs {
            for s in &seconds {
                let mut row = Vec::new();
                head(&mut row);
                row.extend(coord_cells(x));
                row.extend(coord_cells(s));
                let vals = value_cells(f(x, s)).map_err(|e| {
                    with_point_error(e, format!("x={:?} {second}={:?}", x.coords(), s.coords()))
                })?;
                row.extend(vals);
                t.push(row);
            }
        }
        Ok(t)
    };
    let single_kernel = |f: &dyn Fn(&HalfSpacePoint) -> Result<KernelValue>| -> Result<Table> {
        let mut cols = columns.clone();
        cols.extend(coord_columns("x", d));
        cols.extend(["value".to_string(), "log_value".to_string()]);
        let mut t = Table::new(cols);
        for x in &xs {
            let mut row = Vec::new();
            head(&mut row);
            row.extend(coord_cells(x));
            row.extend(
                value_cells(f(x))
                    .map_err(|e| with_point_error(e, format!("x={:?}", x.coords())))?,
            );
            t.push(row);
        }
        Ok(t)
    };
    match req.kernel {
        KernelKind::Poisson => pair_kernel("u", &req.u, &|x, u| {
            ln_poisson_halfspace(x, u, p).map(KernelValue::from_log)
        }),
        KernelKind::Green => pair_kernel("y", &req.y, &|x, y| {
            ln_green_halfspace(x, y, p).map(KernelValue::from_log)
        }),
        KernelKind::GreenLowerBound => pair_kernel("y", &req.y, &|x, y| {
            green_lower_bound(x, y, p.alpha(), d).map(KernelValue::from_value)
        }),
        KernelKind::BrownianGreen => pair_kernel("y", &req.y, &|x, y| {
            brownian_green_halfspace(x, y).map(KernelValue::from_value)
        }),
        KernelKind::StableGreen => pair_kernel("y", &req.y, &|x, y| {
            stable_limit_green(x, y, p.alpha(), d).map(KernelValue::from_value)
        }),
        KernelKind::StablePoisson => pair_kernel("u", &req.u, &|x, u| {
            stable_limit_poisson(x, u, p.alpha(), d).map(KernelValue::from_value)
        }),
        KernelKind::Potential => {
            single_kernel(&|x| ln_potential_m(x.coords(), p).map(KernelValue::from_log))
        }
        KernelKind::Levy => {
            single_kernel(&|x| ln_levy_density(x.coords(), p).map(KernelValue::from_log))
        }
        KernelKind::ExitDiscount => {
            columns.extend([
                "z".to_string(),
                "value".to_string(),
                "log_value".to_string(),
            ]);
            let mut t = Table::new(columns.clone());
            for &z in &req.z {
                let mut row = Vec::new();
                head(&mut row);
                row.push(z.into());
                row.extend(
                    value_cells(exit_discount_m(z, p).map(KernelValue::from_value))
                        .map_err(|e| with_point_error(e, format!("z={z}")))?,
                );
                t.push(row);
            }
            Ok(t)
        }
        KernelKind::Density => {
            columns.push("t".into());
            columns.extend(coord_columns("x", d));
            columns.extend(["value".to_string(), "log_value".to_string()]);
            let mut t = Table::new(columns.clone());
            for &time in &req.t {
                for x in &xs {
                    let mut row = Vec::new();
                    head(&mut row);
                    row.push(time.into());
                    row.extend(coord_cells(x));
                    let v = ln_density_via_subordination(time, x.coords(), p)
                        .map(KernelValue::from_log);
                    row.extend(value_cells(v).map_err(|e| {
                        with_point_error(e, format!("t={time} x={:?}", x.coords()))
                    })?);
                    t.push(row);
                }
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_row() {
        let mut req = EvalRequest::new(
            KernelKind::Poisson,
            ProcessParams::new(1.0, 1.0, 1).unwrap(),
        );
        req.x = vec![vec![1.0]];
        req.u = vec![vec![-1.0]];
        let t = run_eval(&req).unwrap();
        assert_eq!(
            t.columns,
            ["kernel", "alpha", "m", "d", "x", "u", "value", "log_value"]
        );
        let Cell::Num(v) = t.rows[0][6] else { panic!() };
        assert!((v - 0.021_539_279_301_848_63).abs() < 1e-15);
    }

    #[test]
    fn exit_discount_row() {
        let mut req = EvalRequest::new(
            KernelKind::ExitDiscount,
            ProcessParams::new(1.0, 1.0, 1).unwrap(),
        );
        req.z = vec![1.0];
        let t = run_eval(&req).unwrap();
        let Cell::Num(v) = t.rows[0][5] else { panic!() };
        assert!((v - 0.157_299_207_050_285_13).abs() < 1e-12);
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let req = EvalRequest::new(KernelKind::Green, ProcessParams::new(1.0, 1.0, 2).unwrap());
        let t = run_eval(&req).unwrap();
        assert!(t.is_empty());
        assert_eq!(
            t.to_csv().unwrap(),
            "kernel,alpha,m,d,x_1,x_2,y_1,y_2,value,log_value\n"
        );
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let mut req = EvalRequest::new(
            KernelKind::Potential,
            ProcessParams::new(1.0, 1.0, 2).unwrap(),
        );
        req.x = vec![vec![1.0]];
        assert!(matches!(run_eval(&req), Err(Error::Config(_))));
    }
}
