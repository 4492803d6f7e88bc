//! Randomised invariants of the kernels, the sufficient statistics and the
//! table writers.

use proptest::prelude::*;

use relkernel::harness::{Cell, Table};
use relkernel::kernels::{
    exit_discount_m, green_1d, green_halfspace, ln_poisson_halfspace, poisson_halfspace,
    potential_m, HalfSpacePoint, ProcessParams,
};
use relkernel::mc::Moments;

fn params() -> impl Strategy<Value = ProcessParams> {
    (0.1f64..1.9, 0.2f64..5.0, 1usize..=3)
        .prop_map(|(a, m, d)| ProcessParams::new(a, m, d).unwrap())
}

fn interior(d: usize) -> impl Strategy<Value = HalfSpacePoint> {
    (prop::collection::vec(-3.0f64..3.0, d - 1), 0.05f64..5.0).prop_map(|(mut c, last)| {
        c.push(last);
        HalfSpacePoint::new(c).unwrap()
    })
}

fn exterior(d: usize) -> impl Strategy<Value = HalfSpacePoint> {
    interior(d).prop_map(|p| p.reflected())
}

fn setup() -> impl Strategy<
    Value = (
        ProcessParams,
        HalfSpacePoint,
        HalfSpacePoint,
        HalfSpacePoint,
    ),
> {
    params().prop_flat_map(|p| (Just(p), interior(p.d()), interior(p.d()), exterior(p.d())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn green_is_symmetric_and_positive((p, x, y, _u) in setup()) {
        prop_assume!(x.distance(&y) > 1e-6);
        let a = green_halfspace(&x, &y, &p).unwrap();
        let b = green_halfspace(&y, &x, &p).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!(a == b || ((a - b) / a).abs() < 1e-12);
    }

    #[test]
    fn poisson_scaling_identity((p, x, _y, u) in setup(), m in 0.3f64..6.0) {
        let pm = p.with_m(m).unwrap();
        let k = pm.kappa();
        let lhs = ln_poisson_halfspace(&x, &u, &pm).unwrap();
        let rhs = (p.d() as f64 / p.alpha()) * m.ln()
            + ln_poisson_halfspace(&x.scaled(k), &u.scaled(k), &pm.with_m(1.0).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn kernel_value_matches_log_companion((p, x, _y, u) in setup()) {
        let v = poisson_halfspace(&x, &u, &p).unwrap();
        let l = ln_poisson_halfspace(&x, &u, &p).unwrap();
        prop_assume!(v > 1e-300);
        prop_assert!(((v - l.exp()) / v).abs() < 1e-12);
    }

    #[test]
    fn exit_discount_is_a_decreasing_probability(a in 0.1f64..1.9, m in 0.2f64..5.0, z in 0.01f64..5.0) {
        let p = ProcessParams::new(a, m, 1).unwrap();
        let e1 = exit_discount_m(z, &p).unwrap();
        let e2 = exit_discount_m(z * 1.5, &p).unwrap();
        prop_assert!((0.0..1.0).contains(&e1));
        prop_assert!(e2 <= e1);
    }

    #[test]
    fn killed_green_function_is_below_free_potential(a in 0.1f64..1.9, x in 0.05f64..5.0, y in 0.05f64..5.0) {
        prop_assume!((x - y).abs() > 1e-3);
        let p = ProcessParams::new(a, 1.0, 1).unwrap();
        prop_assert!(green_1d(x, y, &p).unwrap() <= potential_m(&[x - y], &p).unwrap());
    }

    #[test]
    fn moments_merge_is_order_insensitive(v in prop::collection::vec(-10.0f64..10.0, 2..200), split in 0usize..200) {
        let split = split.min(v.len());
        let mut all = Moments::default();
        v.iter().for_each(|w| all.push(*w));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        v[..split].iter().for_each(|w| a.push(*w));
        v[split..].iter().for_each(|w| b.push(*w));
        b.merge(&a);
        prop_assert_eq!(all.n, b.n);
        prop_assert!((all.sum - b.sum).abs() <= 1e-12 * (1.0 + all.sum_sq));
        prop_assert!((all.sum_sq - b.sum_sq).abs() <= 1e-12 * (1.0 + all.sum_sq));
    }

    #[test]
    fn csv_and_json_round_trip_bit_exactly(vals in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..20)) {
        let mut t = Table::new(["v"]);
        vals.iter().for_each(|v| t.push(vec![Cell::Num(*v)]));
        let csv = t.to_csv().unwrap();
        let json: Vec<serde_json::Value> = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        for ((line, obj), v) in csv.lines().skip(1).zip(&json).zip(&vals) {
            let from_csv: f64 = line.parse().unwrap();
            prop_assert_eq!(from_csv.to_bits(), v.to_bits());
            prop_assert_eq!(obj["v"].as_f64().unwrap().to_bits(), v.to_bits());
        }
    }
}
