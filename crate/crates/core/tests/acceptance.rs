//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use relkernel::harness::{run_suite, CheckOptions, CheckReport, Suite};

struct Criterion {
    id: u32,
    title: &'static str,
    suite: Suite,
    /// Only reports whose name starts with this prefix count.
    prefix: &'static str,
    min_checks: usize,
    time_limit: Option<Duration>,
}

const fn crit(
    id: u32,
    title: &'static str,
    suite: Suite,
    prefix: &'static str,
    min_checks: usize,
    limit_s: Option<u64>,
) -> Criterion {
    let time_limit = match limit_s {
        Some(s) => Some(Duration::from_secs(s)),
        None => None,
    };
    Criterion {
        id,
        title,
        suite,
        prefix,
        min_checks,
        time_limit,
    }
}

const CRITERIA: [Criterion; 11] = [
    crit(1, "sweeping-out identity", Suite::Sweep, "", 27, Some(30)),
    crit(2, "Poisson kernel mass", Suite::Mass, "", 81, Some(60)),
    crit(3, "dimensional reduction", Suite::Reduction, "", 100, None),
    crit(4, "scaling identities", Suite::Scaling, "", 120, None),
    crit(
        5,
        "Cauchy closed form and FFT inversion",
        Suite::Fourier,
        "",
        21,
        None,
    ),
    crit(6, "stable limits", Suite::StableLimit, "", 40, None),
    crit(7, "Green lower bound", Suite::Bounds, "", 100, None),
    crit(
        8,
        "green_1d spot value",
        Suite::Spot,
        "spot-green-1d",
        1,
        None,
    ),
    crit(
        9,
        "MC harmonic measure",
        Suite::McHarmonic,
        "",
        2,
        Some(300),
    ),
    crit(10, "MC 0-Green bounds", Suite::McGreen0, "", 10, Some(600)),
    crit(11, "subordinator law", Suite::Subordinator, "", 6, None),
];

fn worst(reports: &[&CheckReport]) -> String {
    reports
        .iter()
        .filter(|r| !r.pass)
        .chain(reports.iter().filter(|r| r.pass))
        .map(|r| {
            format!(
                "{}: lhs={:.6e} rhs={:.6e} tol={:.1e} [{}]",
                r.check_name, r.lhs, r.rhs, r.tolerance, r.inputs
            )
        })
        .next()
        .unwrap_or_default()
}

fn main() -> ExitCode {
    let opts = CheckOptions::default();
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let all = run_suite(c.suite, &opts);
        let elapsed = start.elapsed();
        let reports: Vec<&CheckReport> = all
            .iter()
            .filter(|r| r.check_name.starts_with(c.prefix))
            .collect();
        let bad = reports.iter().filter(|r| !r.pass).count();
        let mut problems = Vec::new();
        if bad > 0 {
            problems.push(format!(
                "{bad} of {} checks failed; first: {}",
                reports.len(),
                worst(&reports)
            ));
        }
        if reports.len() < c.min_checks {
            problems.push(format!(
                "only {} checks, expected at least {}",
                reports.len(),
                c.min_checks
            ));
        }
        if let Some(limit) = c.time_limit.filter(|l| elapsed > *l) {
            problems.push(format!(
                "took {:.1}s, limit {}s",
                elapsed.as_secs_f64(),
                limit.as_secs()
            ));
        }
        let status = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {} ({} checks, {:.2}s){}",
            c.id,
            c.title,
            reports.len(),
            elapsed.as_secs_f64(),
            if problems.is_empty() {
                String::new()
            } else {
                format!(": {}", problems.join("; "))
            }
        );
        if !problems.is_empty() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
