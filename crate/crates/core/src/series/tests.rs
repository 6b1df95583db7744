use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use proptest::prelude::*;

use super::*;
use crate::compact::Shape;
use crate::numeric::c64;

fn f1(src: &str) -> FunctionExpr {
    FunctionExpr::parse(src, 1).unwrap()
}

fn f2(src: &str) -> FunctionExpr {
    FunctionExpr::parse(src, 2).unwrap()
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Σ c_ν z^ν for integer ν, one variable.
struct Laurent(Vec<(i32, C64)>);

impl ComplexMap for Laurent {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, z: &[C64]) -> crate::Result<C64> {
        Ok(self.0.iter().map(|(k, c)| c * z[0].powi(*k)).sum())
    }
}

#[test]
fn exp_taylor_coefficients() {
    let t = TorusSamples::sample(&f1("exp(z)"), &[1.0], 64).unwrap();
    for k in 0..=10 {
        let c = t.coeff(&[k]).unwrap();
        assert!((c - 1.0 / factorial(k as u32)).norm() < 1e-12, "k={k}");
    }
    let c5 = coeff(&f1("exp(z)"), &[5], &[1.0], 64).unwrap();
    assert!((c5 - 1.0 / 120.0).norm() < 1e-12);
}

#[test]
fn laurent_of_partial_fractions() {
    // 1/(z(1−z)) = 1/z + Σ_{k≥0} z^k on 0 < |z| < 1
    let f = f1("1/(z*(1-z))");
    let t = laurent_table(&f, 5, &[0.5], 256).unwrap();
    assert!((t.get(&[-1]).unwrap() - 1.0).norm() < 1e-10);
    for k in 0..=5 {
        assert!((t.get(&[k]).unwrap() - 1.0).norm() < 1e-10, "k={k}");
    }
    for k in -5..=-2 {
        assert!(t.get(&[k]).unwrap().norm() < 1e-10);
    }
}

#[test]
fn two_variable_laurent() {
    let f = f2("1/(z1*z2)");
    assert!((coeff(&f, &[-1, -1], &[0.5, 0.5], 64).unwrap() - 1.0).norm() < 1e-10);
    assert!(coeff(&f, &[0, 0], &[0.5, 0.5], 64).unwrap().norm() < 1e-10);
}

#[test]
fn taylor_table_examples() {
    let t = taylor_table(&f1("z^2"), 3, &[1.0], 32).unwrap();
    assert_eq!(t.len(), 4);
    for (nu, c) in t.entries() {
        let expected = if nu == [2] { 1.0 } else { 0.0 };
        assert!((c - expected).norm() < 1e-12);
    }
    let t = taylor_table(&f2("exp(z1+z2)"), 2, &[1.0, 1.0], 32).unwrap();
    assert!((t.get(&[1, 1]).unwrap() - 1.0).norm() < 1e-10);
    // product expansion oracle: 1/(a!b!)
    for (nu, c) in t.entries() {
        let oracle = 1.0 / (factorial(nu[0] as u32) * factorial(nu[1] as u32));
        assert!((c - oracle).norm() < 1e-10);
    }
    let t = taylor_table(&f1("2-3*i"), 4, &[1.0], 16).unwrap();
    assert!((t.get(&[0]).unwrap() - c64(2.0, -3.0)).norm() < 1e-14);
    assert!(t.entries().skip(1).all(|(_, c)| c.norm() < 1e-14));
}

#[test]
fn too_few_nodes_rejected() {
    assert!(matches!(
        coeff(&f1("z"), &[0], &[1.0], 7),
        Err(Error::Argument(_))
    ));
    assert!(coeff(&f1("z"), &[0], &[0.0], 8).is_err());
    assert!(matches!(
        coeff(&f1("z"), &[0, 0], &[1.0, 1.0], 8),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn pole_on_torus_reported() {
    match coeff(&f1("1/(z-1)"), &[0], &[1.0], 16) {
        Err(Error::PoleProximity { point, .. }) => assert!((point[0] - 1.0).norm() < 1e-15),
        other => panic!("{other:?}"),
    }
}

#[test]
fn homogeneous_sum_examples() {
    let t = taylor_table(&f1("exp(z)"), 6, &[1.0], 64).unwrap();
    let p2 = homogeneous_sum(&t, 2).unwrap();
    let z = MultiIndex::new(vec![1]);
    assert!((p2.coeff(&MultiIndex::zero(1)) - 1.0).norm() < 1e-12);
    assert!((p2.coeff(&z) - 1.0).norm() < 1e-12);
    assert!((p2.coeff(&MultiIndex::new(vec![2])) - 0.5).norm() < 1e-12);
    assert!(p2.degree() <= 2);
    let p0 = homogeneous_sum(&t, 0).unwrap();
    assert!(p0.degree() == 0);
    assert!(matches!(homogeneous_sum(&t, 7), Err(Error::Argument(_))));
}

#[test]
fn geometric_tail() {
    let f = f1("1/(1-z)");
    let t = taylor_table(&f, 12, &[0.75], 128).unwrap();
    let k = CompactNet::from_shape(
        &Shape::Disk {
            center: c64(0.0, 0.0),
            radius: 0.5,
        },
        0.02,
    )
    .unwrap();
    for m in 0..=10 {
        let p = homogeneous_sum(&t, m).unwrap();
        let err = crate::runge::sup_error(&f, &p, &k).unwrap();
        let oracle = 2.0 * 0.5f64.powi(m as i32 + 1);
        assert!(
            (err - oracle).abs() <= 0.1 * oracle,
            "m={m}: {err} vs {oracle}"
        );
    }
}

#[test]
fn convergence_on_unit_disk() {
    let f = f1("exp(z)");
    let t = taylor_table(&f, 20, &[1.0], 64).unwrap();
    let k = CompactNet::from_shape(
        &Shape::Disk {
            center: c64(0.0, 0.0),
            radius: 1.0,
        },
        0.05,
    )
    .unwrap();
    let m = compact_convergence_check(&f, &t, &k, 1e-6).unwrap();
    // the sup over the disk is attained at z = 1, which is a net point:
    // smallest m with e − Σ_{k≤m} 1/k! < 1e-6
    let oracle = (0..)
        .find(|&m| std::f64::consts::E - (0..=m).map(|k| 1.0 / factorial(k)).sum::<f64>() < 1e-6)
        .unwrap();
    assert_eq!(m, oracle);
    assert!(m <= 12);
    let sup_f = crate::compact::max_abs_on(&k, &f).unwrap();
    assert_eq!(
        compact_convergence_check(&f, &t, &k, sup_f + 1.0 + 1e-9).unwrap(),
        0
    );
    // monotone in ε
    let mut prev = u32::MAX;
    for e in [1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0] {
        let m = compact_convergence_check(&f, &t, &k, e).unwrap();
        assert!(m <= prev);
        prev = m;
    }
}

#[test]
fn divergence_at_boundary_is_reported() {
    let f = f1("1/(1-z)");
    let t = taylor_table(&f, 30, &[0.999], 128).unwrap();
    let k = CompactNet::from_shape(
        &Shape::Circle {
            center: c64(0.0, 0.0),
            radius: 0.999,
        },
        0.01,
    )
    .unwrap();
    match compact_convergence_check(&f, &t, &k, 1e-6) {
        Err(Error::Convergence { best_error, .. }) => assert!(best_error > 1e-6),
        other => panic!("{other:?}"),
    }
    let outside = CompactNet::from_points(vec![vec![c64(1.5, 0.0)]], 0.01).unwrap();
    assert!(matches!(
        compact_convergence_check(&f, &t, &outside, 1e-6),
        Err(Error::Argument(_))
    ));
}

#[test]
fn negative_indices_vanish_for_holomorphic() {
    assert!(negative_vanishing_check(&f2("exp(z1)*z2"), 3, &[1.0, 1.0], 64).unwrap() < 1e-10);
    assert!(negative_vanishing_check(&f1("1/z"), 1, &[1.0], 64).unwrap() >= 1.0 - 1e-12);
    assert!(
        negative_vanishing_check(&f2("1 + z1*z2^3 - 2*z1^2"), 4, &[1.0, 1.0], 16).unwrap() < 1e-12
    );
}

fn rot(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c64(c, 0.0), c64(-s, 0.0)], [c64(s, 0.0), c64(c, 0.0)]]
}

#[test]
fn rotation_uniqueness_examples() {
    let id = rot(0.0);
    let swap = [
        [c64(0.0, 0.0), c64(1.0, 0.0)],
        [c64(1.0, 0.0), c64(0.0, 0.0)],
    ];
    let f = f2("z1^2");
    assert!(rotation_uniqueness_check(&f, id, 2, &[1.0, 1.0], 32).unwrap() < 1e-12);
    assert!(rotation_uniqueness_check(&f, swap, 2, &[1.0, 1.0], 32).unwrap() < 1e-10);
    let e = f2("exp(z1+z2)");
    assert!(rotation_uniqueness_check(&e, rot(TAU / 8.0), 3, &[1.0, 1.0], 64).unwrap() < 1e-8);
    let shear = [
        [c64(1.0, 0.0), c64(1.0, 0.0)],
        [c64(0.0, 0.0), c64(1.0, 0.0)],
    ];
    assert!(rotation_uniqueness_check(&f, shear, 2, &[1.0, 1.0], 32).is_err());
    // complex unitary
    let u = [
        [c64(FRAC_1_SQRT_2, 0.0), c64(0.0, FRAC_1_SQRT_2)],
        [c64(0.0, FRAC_1_SQRT_2), c64(FRAC_1_SQRT_2, 0.0)],
    ];
    let g = f2("sin(z1)*cos(z2) + z1*z2");
    assert!(rotation_uniqueness_check(&g, u, 4, &[1.0, 1.0], 64).unwrap() < 1e-8);
}

#[test]
fn table_json_round_trip() {
    let t = laurent_table(&f1("1/z + z"), 2, &[1.0], 16).unwrap();
    let s = serde_json::to_string(&t).unwrap();
    let back: SeriesTable = serde_json::from_str(&s).unwrap();
    assert_eq!(back, t);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["dim"], 1);
    assert_eq!(v["entries"][0]["nu"][0], -2);
}

#[test]
fn coefficients_thread_independent() {
    let f = f2("exp(z1)*sin(z2) + 1/(3-z1*z2)");
    let run = || {
        let t = laurent_table(&f, 3, &[0.9, 1.1], 64).unwrap();
        t.entries()
            .map(|(_, c)| (c.re.to_bits(), c.im.to_bits()))
            .collect::<Vec<_>>()
    };
    assert_eq!(
        exec::with_threads(Some(1), run),
        exec::with_threads(Some(3), run)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trapezoid_exact_for_laurent_polynomials(
        coeffs in prop::collection::vec((-7i32..=7, -1.0..1.0f64, -1.0..1.0f64), 1..8),
        r in 0.5..1.5f64,
    ) {
        let mut exact: BTreeMap<i32, C64> = BTreeMap::new();
        for (k, a, b) in &coeffs {
            *exact.entry(*k).or_default() += c64(*a, *b);
        }
        let f = Laurent(exact.iter().map(|(k, c)| (*k, *c)).collect());
        let t = laurent_table(&f, 7, &[r], 16).unwrap();
        // roundoff in the samples is amplified by r^-ν
        let scale: f64 = exact.iter().map(|(k, c)| c.norm() * r.powi(*k)).sum::<f64>().max(1.0);
        for (nu, c) in t.entries() {
            let want = exact.get(&nu[0]).copied().unwrap_or_default();
            let tol = 1e-13 * scale * r.powi(-nu[0]);
            prop_assert!((c - want).norm() < tol.max(1e-12), "nu={:?}: {} vs {}", nu, c, want);
        }
    }

    #[test]
    fn coefficients_do_not_depend_on_radius(k in 0i32..8, r1 in 0.3..1.0f64, r2 in 1.0..2.0f64) {
        let f = f1("exp(z)*cos(z)");
        let a = coeff(&f, &[k], &[r1], 64).unwrap();
        let b = coeff(&f, &[k], &[r2], 64).unwrap();
        prop_assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn coeff_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, k in -3i32..6) {
        let f = f1("exp(z)");
        let g = f1("1/(2-z)");
        let h = FunctionExpr::parse(&format!("({a})*exp(z) + ({b})/(2-z)"), 1).unwrap();
        let lhs = coeff(&h, &[k], &[1.0], 64).unwrap();
        let rhs = coeff(&f, &[k], &[1.0], 64).unwrap() * a + coeff(&g, &[k], &[1.0], 64).unwrap() * b;
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}
