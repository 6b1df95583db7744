use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::compact::{CompactNet, Shape};
use crate::expr::FunctionExpr;
use crate::numeric::c64;

fn f1(src: &str) -> FunctionExpr {
    FunctionExpr::parse(src, 1).unwrap()
}

fn unit_square() -> PolygonalContour {
    PolygonalContour::rectangle(c64(-0.5, -0.5), c64(0.5, 0.5), 0.0).unwrap()
}

fn point_net(pts: &[C64], h: f64) -> CompactNet {
    CompactNet::new(1, pts.to_vec(), h).unwrap()
}

#[test]
fn single_point_gives_rectangle() {
    let k = point_net(&[c64(0.0, 0.0)], 0.01);
    let g = build_contour(&k, &Neighborhood::Margin(1.0), Some(0.25)).unwrap();
    assert_eq!(g.cycles().len(), 1);
    // four corners plus the closing vertex
    assert_eq!(g.cycles()[0].len(), 5);
    assert_eq!(g.winding_number(c64(0.0, 0.0)), 1);
    let p = partition(&g, 1e-3).unwrap();
    let w = cauchy_eval(&f1("1"), &p, c64(0.0, 0.0), QuadratureRule::Trapezoid).unwrap();
    assert!((w - c64(1.0, 0.0)).norm() < 1e-3);
}

#[test]
fn disk_contour_distance_bounds() {
    let k = CompactNet::from_shape(
        &Shape::Disk {
            center: c64(0.0, 0.0),
            radius: 1.0,
        },
        0.02,
    )
    .unwrap();
    let g = build_contour(&k, &Neighborhood::Margin(0.5), Some(0.1)).unwrap();
    // brute-force distance between the net and every contour edge
    let d = k
        .points()
        .map(|p| g.distance_to(p[0]))
        .fold(f64::INFINITY, f64::min);
    assert!((0.05..=0.5).contains(&d), "{d}");
    // the region lies inside the margin
    let far = g
        .cycles()
        .iter()
        .flatten()
        .map(|v| k.distance_to(&[*v]))
        .fold(0.0, f64::max);
    assert!(far <= 0.5);
    for p in k.points().step_by(37) {
        assert_eq!(g.winding_number(p[0]), 1);
    }
}

/// Connected components of the fattened net at grid resolution, by flood fill
/// over points (independent of the contour code).
fn clusters(pts: &[C64], link: f64) -> usize {
    let n = pts.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && (pts[i] - pts[j]).norm() <= link {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}

#[test]
fn separated_points_give_separate_cycles() {
    let pts = [c64(-2.0, 0.0), c64(2.0, 0.0)];
    let k = point_net(&pts, 0.01);
    let g = build_contour(&k, &Neighborhood::Margin(0.5), None).unwrap();
    assert_eq!(g.cycles().len(), clusters(&pts, 1.0));
    assert_eq!(g.cycles().len(), 2);
    assert!(g.min_cycle_separation() > 0.0);
    assert_eq!(g.winding_number(c64(-2.0, 0.0)), 1);
    assert_eq!(g.winding_number(c64(2.0, 0.0)), 1);
    assert_eq!(g.winding_number(c64(0.0, 0.0)), 0);
}

#[test]
fn annulus_contour_has_hole() {
    let k = CompactNet::from_shape(
        &Shape::Annulus {
            center: c64(0.0, 0.0),
            inner: 0.8,
            outer: 1.0,
        },
        0.02,
    )
    .unwrap();
    let g = build_contour(&k, &Neighborhood::Margin(0.3), None).unwrap();
    assert_eq!(g.cycles().len(), 2);
    assert_eq!(g.winding_number(c64(0.0, 0.0)), 0);
    assert_eq!(g.winding_number(c64(0.9, 0.0)), 1);
    let p = partition(&g, 1e-3).unwrap();
    let inside = cauchy_eval(&f1("1"), &p, c64(0.0, 0.9), QuadratureRule::Trapezoid).unwrap();
    let hole = cauchy_eval(&f1("1"), &p, c64(0.0, 0.0), QuadratureRule::Trapezoid).unwrap();
    assert!((inside - 1.0).norm() < 1e-3);
    assert!(hole.norm() < 1e-3);
}

#[test]
fn oversized_cells_rejected() {
    let k = point_net(&[c64(0.0, 0.0)], 0.01);
    assert!(matches!(
        build_contour(&k, &Neighborhood::Margin(1.0), Some(0.25 + 1e-9)),
        Err(Error::Geometry(_))
    ));
    // coarse net relative to the margin: squares spill outside
    let k = point_net(&[c64(0.0, 0.0)], 0.9);
    assert!(matches!(
        build_contour(&k, &Neighborhood::Margin(1.0), None),
        Err(Error::Geometry(_))
    ));
    assert!(build_contour(&k, &Neighborhood::Margin(0.0), None).is_err());
}

#[test]
fn forbidden_set_neighbourhood() {
    let k = point_net(&[c64(0.0, 0.0), c64(0.3, 0.0)], 0.01);
    let f = vec![c64(1.0, 0.0), c64(0.0, -1.0)];
    let g = build_contour(&k, &Neighborhood::Forbidden(f.clone()), None).unwrap();
    for q in &f {
        assert_eq!(g.winding_number(*q), 0);
        assert!(g.distance_to(*q) > 0.0);
    }
    assert_eq!(g.winding_number(c64(0.3, 0.0)), 1);
    let touching = Neighborhood::Forbidden(vec![c64(0.0, 0.0)]);
    assert!(matches!(
        build_contour(&k, &touching, None),
        Err(Error::Geometry(_))
    ));
}

#[test]
fn diagonal_contacts_are_filled() {
    // two blobs touching only at a grid corner
    let s = 0.1;
    let k = point_net(&[c64(0.05, 0.05), c64(0.15, 0.15)], 1e-6);
    let g = build_contour(&k, &Neighborhood::Margin(1.0), Some(s)).unwrap();
    assert_eq!(g.cycles().len(), 1);
    assert_eq!(g.winding_number(c64(0.05, 0.05)), 1);
    assert_eq!(g.winding_number(c64(0.15, 0.15)), 1);
}

#[test]
fn partition_examples() {
    let p = partition(&unit_square(), 1.0).unwrap();
    // each side of length 1 is not < 1, so it is split in two
    assert_eq!(p.len(), 8);
    assert!(p.chords().iter().all(|c| c.norm() < 1.0));

    let big = partition(&unit_square(), 10.0).unwrap();
    assert_eq!(big.len(), 4);

    let g = build_contour(
        &point_net(&[c64(0.0, 0.0), c64(0.7, 0.2)], 0.01),
        &Neighborhood::Margin(0.4),
        None,
    )
    .unwrap();
    let delta = 0.013;
    let p = partition(&g, delta).unwrap();
    let expected = (g.length() / delta).ceil() + g.vertex_count() as f64;
    let n = p.len() as f64;
    assert!(n >= expected / 2.0 && n <= expected * 2.0);
    assert!(p.chords().iter().all(|c| c.norm() < delta));
    // nodes lie on the contour
    assert!(p.nodes().iter().all(|z| g.distance_to(*z) < 1e-12));
    assert!(partition(&g, 0.0).is_err());
}

#[test]
fn trapezoid_weights_telescope() {
    let p = partition(&unit_square(), 0.07).unwrap();
    for rule in [QuadratureRule::Trapezoid, QuadratureRule::TerminalPoint] {
        let w = p.weights(rule);
        // ∫ dζ over a closed curve is 0
        let total: C64 = w.iter().sum();
        assert!(total.norm() < 1e-14);
    }
}

#[test]
fn identity_at_interior_point() {
    let p = partition(&unit_square(), 1e-3).unwrap();
    let z = c64(0.3, 0.0);
    let v = cauchy_eval(&f1("z"), &p, z, QuadratureRule::Trapezoid).unwrap();
    assert!((v - z).norm() < 1e-6, "{}", (v - z).norm());
    // the plain terminal-point sum is only first order
    let r = cauchy_eval(&f1("z"), &p, z, QuadratureRule::TerminalPoint).unwrap();
    assert!((r - z).norm() < 1e-2);
}

#[test]
fn outside_point_integrates_to_zero() {
    let p = partition(&unit_square(), 1e-3).unwrap();
    let v = cauchy_eval(&f1("1"), &p, c64(2.0, 1.0), QuadratureRule::Trapezoid).unwrap();
    assert!(v.norm() < 1e-3);
}

#[test]
fn refinement_does_not_increase_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let zs: Vec<C64> = (0..10)
        .map(|_| c64(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)))
        .collect();
    let f = f1("z");
    let mut prev = vec![f64::INFINITY; zs.len()];
    for k in 0..8 {
        let p = partition(&unit_square(), 0.1 / 2f64.powi(k)).unwrap();
        let vals = cauchy_eval_many(&f, &p, &zs, QuadratureRule::Trapezoid).unwrap();
        for (i, (v, z)) in vals.iter().zip(&zs).enumerate() {
            let e = (v - z).norm();
            assert!(
                e <= prev[i] + 1e-12,
                "point {i} step {k}: {e} > {}",
                prev[i]
            );
            prev[i] = e;
        }
    }
}

#[test]
fn evaluation_too_close_is_refused() {
    let k = point_net(&[c64(0.0, 0.0)], 0.01);
    let g = build_contour(&k, &Neighborhood::Margin(1.0), None).unwrap();
    let p = partition(&g, 0.01).unwrap();
    let v = g.cycles()[0][0];
    assert!(matches!(
        cauchy_eval(&f1("1"), &p, v + c64(1e-3, 0.0), QuadratureRule::Trapezoid),
        Err(Error::PoleProximity { .. })
    ));
}

#[test]
fn json_round_trip() {
    let g = build_contour(
        &point_net(&[c64(0.0, 0.0)], 0.01),
        &Neighborhood::Margin(1.0),
        None,
    )
    .unwrap();
    let s = serde_json::to_string(&g).unwrap();
    assert!(s.starts_with(r#"{"cycles":[[["#));
    let back: PolygonalContour = serde_json::from_str(&s).unwrap();
    assert_eq!(back, g);
    let bare: PolygonalContour =
        serde_json::from_str(r#"{"cycles":[[[0,0],[1,0],[0,1]]]}"#).unwrap();
    assert_eq!(bare.cycles()[0].len(), 4);
}

fn random_cloud() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..15)
        .prop_map(|v| v.into_iter().map(|(x, y)| c64(x, y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contour_surrounds_every_point(pts in random_cloud(), rho in 0.2..0.6f64) {
        let k = point_net(&pts, 0.01);
        let g = build_contour(&k, &Neighborhood::Margin(rho), None).unwrap();
        let s = rho / 8.0;
        for p in &pts {
            prop_assert_eq!(g.winding_number(*p), 1);
            prop_assert!(g.distance_to(*p) >= s / 2.0);
        }
        prop_assert!(g.min_cycle_separation() > 0.0);
        // every vertex within the margin
        for v in g.cycles().iter().flatten() {
            prop_assert!(k.distance_to(&[*v]) <= rho);
        }
    }
}
