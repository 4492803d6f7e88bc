//! Kernel values against oracles that share no code with the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relkernel::kernels::{
    green_1d, stable_green_constant, stable_green_shape, stable_limit_green, stable_limit_poisson,
    stable_poisson_constant, stable_poisson_shape, HalfSpacePoint, ProcessParams,
};
use relkernel::specfun::{bessel_k, BesselArg};

// K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt by the trapezoid rule,
// which converges geometrically for this doubly exponentially decaying integrand.
fn bessel_k_trapezoid(nu: f64, x: f64) -> f64 {
    let h = 1e-3;
    let mut sum = 0.5 * (-x).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let e = -x * t.cosh() + nu * t;
        if e < -745.0 && x * t.cosh() > 800.0 {
            break;
        }
        sum += (-x * t.cosh()).exp() * (nu * t).cosh();
        k += 1;
    }
    sum * h
}

#[test]
fn bessel_k_matches_integral_representation() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let nu = rng.gen_range(0.0..5.0);
        let x = rng.gen_range(0.05..30.0);
        let want = bessel_k_trapezoid(nu, x);
        let got = bessel_k(BesselArg::new(nu, x).unwrap());
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "K_{nu}({x}) = {got}, oracle {want}"
        );
    }
}

// (1/pi) int_0^{asinh(sqrt(4xy)/|x-y|)} e^{-|x-y| cosh th} dth by composite Simpson.
fn green_cauchy_simpson(x: f64, y: f64, panels: usize) -> f64 {
    let delta = (x - y).abs();
    let upper = ((4.0 * x * y).sqrt() / delta).asinh();
    let h = upper / panels as f64;
    let f = |th: f64| (-delta * th.cosh()).exp();
    let mut sum = f(0.0) + f(upper);
    for i in 1..panels {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / (3.0 * std::f64::consts::PI)
}

#[test]
fn green_1d_spot_value_matches_simpson_oracle() {
    let p = ProcessParams::new(1.0, 1.0, 1).unwrap();
    let g = green_1d(1.0, 2.0, &p).unwrap();
    let oracle = green_cauchy_simpson(1.0, 2.0, 2000);
    assert!((g - 0.1298).abs() < 1e-3);
    assert!((g - oracle).abs() < 1e-12, "{g} vs {oracle}");
    for &(x, y) in &[(0.25, 4.0), (3.0, 3.5), (0.1, 0.2)] {
        let o = green_cauchy_simpson(x, y, 4000);
        assert!(((green_1d(x, y, &p).unwrap() - o) / o).abs() < 1e-10);
    }
}

#[derive(serde::Deserialize)]
struct Golden {
    constants: Vec<GoldenRow>,
}

#[derive(serde::Deserialize)]
struct GoldenRow {
    alpha: f64,
    d: usize,
    green_constant: f64,
    poisson_constant: f64,
}

fn golden() -> Golden {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/golden/stable_constants.json"
    ))
    .unwrap();
    serde_json::from_str(&text).unwrap()
}

fn axis(d: usize, lateral: f64, depth: f64) -> HalfSpacePoint {
    let mut c = vec![0.0; d];
    if d > 1 {
        c[0] = lateral;
    }
    c[d - 1] = depth;
    HalfSpacePoint::new(c).unwrap()
}

#[test]
fn stable_constants_match_golden_file() {
    for row in golden().constants {
        let g = stable_green_constant(row.alpha, row.d);
        let p = stable_poisson_constant(row.alpha, row.d);
        assert!(((g - row.green_constant) / row.green_constant).abs() < 1e-13);
        assert!(((p - row.poisson_constant) / row.poisson_constant).abs() < 1e-13);
    }
}

#[test]
fn extrapolated_limits_reproduce_golden_calibration() {
    for row in golden().constants {
        let (a, d) = (row.alpha, row.d);
        let x = axis(d, 0.0, 1.0);
        let y = axis(d, 0.3, 2.0);
        let u = axis(d, -0.4, -1.5);
        let g = stable_limit_green(&x, &y, a, d).unwrap() / stable_green_shape(&x, &y, a).unwrap();
        let p =
            stable_limit_poisson(&x, &u, a, d).unwrap() / stable_poisson_shape(&x, &u, a).unwrap();
        assert!(
            ((g - row.green_constant) / row.green_constant).abs() < 1e-4,
            "green alpha {a} d {d}: {g}"
        );
        assert!(
            ((p - row.poisson_constant) / row.poisson_constant).abs() < 1e-4,
            "poisson alpha {a} d {d}: {p}"
        );
    }
}

#[test]
fn cauchy_stable_shape_has_arcsinh_closed_form() {
    let shape = stable_green_shape(&axis(1, 0.0, 1.0), &axis(1, 0.0, 2.0), 1.0).unwrap();
    let exact = 2.0 * (2.0 * 2f64.sqrt()).asinh();
    assert!((shape - exact).abs() < 1e-12 * exact);
}
