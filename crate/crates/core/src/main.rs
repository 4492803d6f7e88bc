#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relkernel::harness::{
    reports_table, run_check, run_eval, run_mc, CheckGrid, CheckOptions, ConfigFile, EvalRequest,
    Experiment, KernelKind, McRequest, OutputFormat, Suite, Table,
};
use relkernel::kernels::ProcessParams;
use relkernel::mc::PathConfig;
use relkernel::Error;

/// Kernels, identity checks and Monte Carlo experiments for the relativistic
/// alpha-stable process on the half-space.
#[derive(Parser, Debug)]
#[command(name = "relkernel", version)]
struct Cli {
    /// Flat `key = value` file overriding defaults; flags override the file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the table to FILE instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct ProcessArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a kernel on the cartesian product of the given points.
    Eval {
        /// poisson, green, exit-discount, density, potential, levy,
        /// green-lower-bound, brownian-green, stable-green, stable-poisson
        kernel: String,
        #[command(flatten)]
        process: ProcessArgs,
        /// Point, comma-separated coordinates; repeat for a grid.
        #[arg(long, allow_hyphen_values = true)]
        x: Vec<String>,
        /// Exterior point (Poisson kernels).
        #[arg(long, allow_hyphen_values = true)]
        u: Vec<String>,
        /// Second interior point (Green functions).
        #[arg(long, allow_hyphen_values = true)]
        y: Vec<String>,
        /// Time (density).
        #[arg(long)]
        t: Vec<f64>,
        /// Boundary distance (exit-discount).
        #[arg(long)]
        z: Vec<f64>,
    },
    /// Run identity suites; exit status 1 if any check fails.
    Check {
        /// Comma-separated suites, or `default` / `all`.
        #[arg(long)]
        suite: Option<String>,
        /// `default` or a grid file with keys alpha, m, d, coords.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Multiply the Poisson constant in the sweep and mass checks.
        #[arg(long, hide = true)]
        corrupt_poisson_constant: Option<f64>,
    },
    /// Run a Monte Carlo experiment against its analytic target.
    Mc {
        /// harmonic, survival, green1, green0, interval-exit
        experiment: String,
        #[command(flatten)]
        process: ProcessArgs,
        /// Start point, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Start point on the axis at this depth.
        #[arg(long)]
        xd: Option<f64>,
        /// Ball centre for green1 / green0.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// Centre of an exterior cube for harmonic.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        /// Half-width of the exterior cube.
        #[arg(long)]
        h: Option<f64>,
        /// Ball radius.
        #[arg(long)]
        radius: Option<f64>,
        /// Survival times.
        #[arg(long)]
        t: Vec<f64>,
        #[arg(long)]
        paths: Option<u64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        stream: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn parse_point(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse coordinate '{c}' in point '{s}'")))
        })
        .collect()
}

fn parse_points(flags: &[String], file: Option<&str>) -> Result<Vec<Vec<f64>>, Error> {
    if !flags.is_empty() {
        return flags.iter().map(|s| parse_point(s)).collect();
    }
    file.map_or(Ok(Vec::new()), |v| {
        v.split(';')
            .filter(|s| !s.trim().is_empty())
            .map(parse_point)
            .collect()
    })
}

fn parse_scalars(flags: &[f64], file: &ConfigFile, key: &str) -> Result<Vec<f64>, Error> {
    if !flags.is_empty() {
        return Ok(flags.to_vec());
    }
    file.get(key).map_or(Ok(Vec::new()), |v| {
        v.split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("config key '{key}': cannot parse '{c}'")))
            })
            .collect()
    })
}

fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    file: &ConfigFile,
    key: &str,
    default: T,
) -> Result<T, Error> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(file.parsed(key)?.unwrap_or(default)),
    }
}

fn process(args: &ProcessArgs, file: &ConfigFile) -> Result<ProcessParams, Error> {
    ProcessParams::new(
        pick(args.alpha, file, "alpha", 1.0)?,
        pick(args.m, file, "m", 1.0)?,
        pick(args.d, file, "d", 1)?,
    )
}

struct Outcome {
    table: Table,
    all_pass: bool,
}

fn run(cli: &Cli, file: &ConfigFile) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Eval {
            kernel,
            process: pa,
            x,
            u,
            y,
            t,
            z,
        } => {
            let mut req = EvalRequest::new(kernel.parse::<KernelKind>()?, process(pa, file)?);
            req.x = parse_points(x, file.get("x"))?;
            req.u = parse_points(u, file.get("u"))?;
            req.y = parse_points(y, file.get("y"))?;
            req.t = parse_scalars(t, file, "t")?;
            req.z = parse_scalars(z, file, "z")?;
            Ok(Outcome {
                table: run_eval(&req)?,
                all_pass: true,
            })
        }
        Command::Check {
            suite,
            grid,
            seed,
            corrupt_poisson_constant,
        } => {
            let suites =
                Suite::parse_list(&pick(suite.clone(), file, "suite", "default".to_string())?)?;
            let grid = match pick(grid.clone(), file, "grid", "default".to_string())?.as_str() {
                "default" => CheckGrid::default(),
                path => CheckGrid::from_file(path.as_ref())?,
            };
            let defaults = CheckOptions::default();
            let opts = CheckOptions {
                grid,
                poisson_constant_scale: pick(
                    *corrupt_poisson_constant,
                    file,
                    "corrupt-poisson-constant",
                    1.0,
                )?,
                seed: pick(*seed, file, "seed", defaults.seed)?,
            };
            let reports = run_check(&suites, &opts);
            let failed = reports.iter().filter(|r| !r.pass).count();
            eprintln!("{} checks, {} failed", reports.len(), failed);
            Ok(Outcome {
                table: reports_table(&reports),
                all_pass: failed == 0,
            })
        }
        Command::Mc {
            experiment,
            process: pa,
            x,
            xd,
            y,
            u,
            h,
            radius,
            t,
            paths,
            dt,
            horizon,
            seed,
            stream,
            workers,
        } => {
            let params = process(pa, file)?;
            let defaults = PathConfig::default();
            let cfg = PathConfig {
                dt: pick(*dt, file, "dt", defaults.dt)?,
                horizon: pick(*horizon, file, "horizon", defaults.horizon)?,
                n_paths: pick(*paths, file, "paths", defaults.n_paths)?,
                seed: pick(*seed, file, "seed", defaults.seed)?,
                stream: pick(*stream, file, "stream", defaults.stream)?,
                workers: match workers {
                    Some(w) => Some(*w),
                    None => file.parsed("workers")?,
                },
            };
            let start = match (x.as_deref().or(file.get("x")), xd.or(file.parsed("xd")?)) {
                (Some(s), _) => parse_point(s)?,
                (None, Some(depth)) => {
                    let mut c = vec![0.0; params.d()];
                    c[params.d() - 1] = depth;
                    c
                }
                (None, None) => {
                    return Err(Error::Config("mc needs a start point: --x or --xd".into()))
                }
            };
            let mut req = McRequest::new(experiment.parse::<Experiment>()?, params, cfg, start);
            req.y = y
                .as_deref()
                .or(file.get("y"))
                .map(parse_point)
                .transpose()?;
            req.u = u
                .as_deref()
                .or(file.get("u"))
                .map(parse_point)
                .transpose()?;
            req.h = pick(*h, file, "h", req.h)?;
            req.radius = pick(*radius, file, "radius", req.radius)?;
            req.t = parse_scalars(t, file, "t")?;
            Ok(Outcome {
                table: run_mc(&req)?,
                all_pass: true,
            })
        }
    }
}

fn emit(cli: &Cli, file: &ConfigFile, table: &Table) -> Result<(), Error> {
    let format: OutputFormat =
        pick(cli.format.clone(), file, "format", "csv".to_string())?.parse()?;
    let text = table.render(format)?;
    match cli
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from))
    {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let file = match &cli.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let outcome = run(&cli, &file)?;
        emit(&cli, &file, &outcome.table)?;
        Ok::<bool, Error>(outcome.all_pass)
    })();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
