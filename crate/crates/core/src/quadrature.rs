//! Adaptive Gauss-Kronrod integration with maps for the two awkward shapes
//! that occur in every kernel formula: an integrable power singularity
//! `t^{beta-1}` at the left endpoint and exponentially decaying tails on a
//! half line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Tolerances and subdivision budget for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Tight relative tolerance with a negligible absolute floor, used for
    /// kernels whose values span many orders of magnitude.
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: 1e-300,
            max_subdivisions: 4000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Config("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }
}

/// A half line `[a, inf)` or `(-inf, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfLine {
    Above(f64),
    Below(f64),
}

// 21-point Kronrod extension of the 10-point Gauss-Legendre rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_846_474,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let asc = asc * half.abs();
    let abs_sum = abs_sum * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_sum);
    }
    (value, err)
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return domain(format!("finite interval required, got [{a}, {b}]"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (value, error) = gauss_kronrod(&f, a, b);
    if !value.is_finite() {
        return domain(format!("integrand not finite on [{a}, {b}]"));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    // segments too narrow to split further; their error stays in the total
    let mut frozen_err = 0.0;
    let mut frozen_value = 0.0;
    let mut subdivisions = 1;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        let Some(seg) = heap.pop() else {
            break;
        };
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b)
            || mid >= seg.a.max(seg.b)
            || (seg.b - seg.a).abs() < 1e3 * f64::MIN_POSITIVE
        {
            frozen_err += seg.error;
            frozen_value += seg.value;
            continue;
        }
        let (v1, e1) = gauss_kronrod(&f, seg.a, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, seg.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return domain(format!("integrand not finite near [{}, {}]", seg.a, seg.b));
        }
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
    // recompute from the pieces to shed accumulated update rounding
    let sum: f64 = heap.iter().map(|s| s.value).sum::<f64>() + frozen_value;
    let err: f64 = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    let tol = spec.abs_tol.max(spec.rel_tol * sum.abs());
    if err > tol && frozen_err > tol {
        return Err(Error::NonConvergence {
            estimate: sum,
            error: err,
            subdivisions,
        });
    }
    Ok(sum)
}

/// `int_0^upper t^{beta-1} f(t) dt` for `f` smooth on `[0, upper]`.
///
/// The substitution `t = s^{1/beta}` turns the weight into the constant
/// `1/beta`. `upper = +inf` is accepted when `f` decays exponentially: the
/// range is split at `t = 1` and the tail goes through
/// [`integrate_semi_infinite`].
pub fn integrate_power_singular<F: Fn(f64) -> f64>(
    f: F,
    beta: f64,
    upper: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return domain(format!("beta must lie in (0, 1], got {beta}"));
    }
    if !(upper > 0.0) {
        return domain(format!("upper limit must be > 0, got {upper}"));
    }
    if upper.is_infinite() {
        let head = power_singular_finite(&f, beta, 1.0, spec)?;
        let tail =
            integrate_semi_infinite(|t| t.powf(beta - 1.0) * f(t), HalfLine::Above(1.0), spec)?;
        return Ok(head + tail);
    }
    power_singular_finite(&f, beta, upper, spec)
}

fn power_singular_finite<F: Fn(f64) -> f64>(
    f: &F,
    beta: f64,
    upper: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    let inv = 1.0 / beta;
    let smooth = |s: f64| f(s.powf(inv)) * inv;
    integrate(smooth, 0.0, upper.powf(beta), spec)
}

/// Integral over a half line of an integrand with (at least) unit-rate
/// exponential decay, through `u = a - ln v` (or `u = b + ln v`) onto `(0, 1]`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    half_line: HalfLine,
    spec: &QuadSpec,
) -> Result<f64> {
    integrate_semi_infinite_scaled(f, half_line, 1.0, spec)
}

/// As [`integrate_semi_infinite`] with the map stretched to a decay length
/// `scale`: `u = a - scale ln v`.
pub fn integrate_semi_infinite_scaled<F: Fn(f64) -> f64>(
    f: F,
    half_line: HalfLine,
    scale: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    if !(scale > 0.0 && scale.is_finite()) {
        return domain(format!("decay scale must be positive, got {scale}"));
    }
    let (origin, sign) = match half_line {
        HalfLine::Above(a) => (a, 1.0),
        HalfLine::Below(b) => (b, -1.0),
    };
    if !origin.is_finite() {
        return domain("half line endpoint must be finite");
    }
    let mapped = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let w = -scale * v.ln();
        let val = f(origin + sign * w);
        if val == 0.0 {
            0.0
        } else {
            val * scale / v
        }
    };
    integrate(mapped, 0.0, 1.0, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadSpec {
        QuadSpec::default()
    }

    #[test]
    fn gauss_kronrod_polynomial_exactness() {
        for deg in 0..=31 {
            let (v, _) = gauss_kronrod(&|x: f64| x.powi(deg), 0.0, 1.0);
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((v - want).abs() < 1e-14, "degree {deg}: {v} vs {want}");
        }
    }

    #[test]
    fn power_singular_examples() {
        let v = integrate_power_singular(|_| 1.0, 0.5, 1.0, &spec()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate_power_singular(|_| 1.0, 0.75, 16.0, &spec()).unwrap();
        let want = 16f64.powf(0.75) / 0.75;
        assert!(((v - want) / want).abs() < 1e-12);
        let v = integrate_power_singular(|t: f64| (-t).exp(), 0.5, f64::INFINITY, &spec()).unwrap();
        let want = std::f64::consts::PI.sqrt();
        assert!(((v - want) / want).abs() < 1e-10);
    }

    #[test]
    fn polynomial_exactness_under_weight() {
        let coeffs = [
            0.3, -1.2, 0.7, 2.0, -0.4, 0.05, 1.1, -0.9, 0.2, 0.01, -0.003,
        ];
        for &beta in &[0.25, 0.5, 0.75, 1.0] {
            for &upper in &[0.5f64, 1.0, 3.0] {
                let f = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
                let want: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * upper.powf(beta + k as f64) / (beta + k as f64))
                    .sum();
                let got = integrate_power_singular(f, beta, upper, &spec()).unwrap();
                assert!(
                    ((got - want) / want).abs() < 1e-10,
                    "beta={beta} upper={upper}"
                );
            }
        }
    }

    #[test]
    fn substitution_invariance() {
        let beta: f64 = 0.3;
        let f = |t: f64| (1.0 + t).recip() * (-0.5 * t).exp();
        let direct = integrate(
            |s: f64| f(s.powf(1.0 / beta)) / beta,
            0.0,
            2f64.powf(beta),
            &QuadSpec::relative(1e-13),
        )
        .unwrap();
        let via = integrate_power_singular(f, beta, 2.0, &QuadSpec::relative(1e-13)).unwrap();
        assert!(((direct - via) / direct).abs() < 1e-12);
    }

    #[test]
    fn tightening_tolerance_never_hurts() {
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64)> = vec![
            (
                Box::new(|t: f64| (-t).exp()),
                0.5,
                std::f64::consts::PI.sqrt() * libm::erf(1.0),
            ),
            (Box::new(|t: f64| t * t), 0.25, 1.0 / 2.25),
            (Box::new(|t: f64| t.cos()), 1.0, 1f64.sin()),
        ];
        for (f, beta, want) in &cases {
            let mut prev = f64::INFINITY;
            let mut tol = 1e-4;
            while tol > 1e-13 {
                let s = QuadSpec::new(tol, 1e-300, 2000).unwrap();
                let got = integrate_power_singular(f, *beta, 1.0, &s).unwrap();
                let err = (got - want).abs();
                assert!(err <= prev.max(1e-15), "tol {tol}: err {err} prev {prev}");
                prev = err;
                tol /= 2.0;
            }
        }
    }

    #[test]
    fn semi_infinite_examples() {
        let v = integrate_semi_infinite(|u: f64| u.exp(), HalfLine::Below(0.0), &spec()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = integrate_semi_infinite(|u: f64| (-2.0 * u).exp(), HalfLine::Above(0.0), &spec())
            .unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let v = integrate_semi_infinite_scaled(
            |u: f64| (-0.01 * u).exp(),
            HalfLine::Above(0.0),
            100.0,
            &spec(),
        )
        .unwrap();
        assert!((v - 100.0).abs() < 1e-8);
    }

    #[test]
    fn errors() {
        assert!(integrate_power_singular(|_| 1.0, 0.5, 0.0, &spec()).is_err());
        assert!(integrate_power_singular(|_| 1.0, 1.5, 1.0, &spec()).is_err());
        assert!(QuadSpec::new(0.0, 1e-14, 10).is_err());
        assert!(QuadSpec::new(1e-10, 1e-14, 0).is_err());
        let tight = QuadSpec::new(1e-15, 1e-300, 3).unwrap();
        let r = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tight);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
