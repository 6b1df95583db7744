//! Rational approximation on plane compacts from discretized Cauchy
//! integrals over grid-square contours.

use serde::{Deserialize, Serialize};

use crate::compact::CompactNet;
use crate::contour::{
    build_contour, partition, sum_partial_fractions, ContourPartition, Neighborhood,
    PolygonalContour, QuadratureRule,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::numeric::{ComplexMap, C64};

/// Evaluation within this distance of a pole is refused.
pub const POLE_GUARD: f64 = 1e-9;

/// R(z) = Σ_j a_j / (ζ_j − z), kept in partial-fraction form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PfrJson", into = "PfrJson")]
pub struct PartialFractionRational {
    poles: Vec<C64>,
    coeffs: Vec<C64>,
}

impl PartialFractionRational {
    pub fn new(poles: Vec<C64>, coeffs: Vec<C64>) -> Result<Self> {
        Error::check_dim(poles.len(), coeffs.len())?;
        if poles
            .iter()
            .chain(&coeffs)
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::arg("poles and coefficients must be finite"));
        }
        Ok(PartialFractionRational { poles, coeffs })
    }

    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn pole_distance(&self, z: C64) -> f64 {
        self.poles
            .iter()
            .map(|p| (p - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn eval_at(&self, z: C64) -> Result<C64> {
        let d = self.pole_distance(z);
        if d < POLE_GUARD {
            return Err(Error::PoleProximity {
                point: vec![z],
                modulus: d,
            });
        }
        Ok(sum_partial_fractions(&self.poles, &self.coeffs, z))
    }
}

impl ComplexMap for PartialFractionRational {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, z: &[C64]) -> Result<C64> {
        Error::check_dim(1, z.len())?;
        self.eval_at(z[0])
    }
}

/// Poles at the partition nodes, a_j = w_j f(ζ_j) / 2πi.
pub fn riemann_sum_rational<F: ComplexMap + ?Sized>(
    f: &F,
    p: &ContourPartition,
    rule: QuadratureRule,
) -> Result<PartialFractionRational> {
    let coeffs = p.cauchy_coefficients(f, rule)?;
    PartialFractionRational::new(p.nodes().to_vec(), coeffs)
}

/// max over the net of |f − g|.
pub fn sup_error<F, G>(f: &F, g: &G, k: &CompactNet) -> Result<f64>
where
    F: ComplexMap + ?Sized,
    G: ComplexMap + ?Sized,
{
    Error::check_dim(f.dim(), k.dim())?;
    Error::check_dim(g.dim(), k.dim())?;
    let pts: Vec<&[C64]> = k.points().collect();
    let errs = exec::try_map(&pts, |x| Ok((f.eval(x)? - g.eval(x)?).norm()))?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RungeOptions {
    /// Grid square side; defaults to a eighth of the margin.
    pub cell: Option<f64>,
    pub max_halvings: usize,
    pub rule: QuadratureRule,
    /// Refinement stops early once a partition would exceed this many nodes.
    pub max_nodes: usize,
}

impl Default for RungeOptions {
    fn default() -> Self {
        RungeOptions {
            cell: None,
            max_halvings: 24,
            rule: QuadratureRule::Trapezoid,
            max_nodes: 2_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RungeResult {
    pub rational: PartialFractionRational,
    pub error: f64,
    pub delta: f64,
    pub contour: PolygonalContour,
    /// (δ, sup error) for every refinement step taken.
    pub history: Vec<(f64, f64)>,
}

/// Halve δ from ρ/4 until the sup error over the net drops below ε.
pub fn approximate<F: ComplexMap + ?Sized>(
    f: &F,
    k: &CompactNet,
    margin: f64,
    eps: f64,
    opts: &RungeOptions,
) -> Result<RungeResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::arg(format!(
            "target error must be positive, got {eps}"
        )));
    }
    Error::check_dim(1, f.dim())?;
    f.check_holomorphic()?;
    let contour = build_contour(k, &Neighborhood::Margin(margin), opts.cell)?;
    let mut delta = margin / 4.0;
    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    for _ in 0..=opts.max_halvings {
        let nodes_estimate = contour.length() / delta + contour.vertex_count() as f64;
        if nodes_estimate > opts.max_nodes as f64 {
            return Err(Error::Convergence {
                message: format!(
                    "node budget {} reached at delta {delta:e} after {} refinements",
                    opts.max_nodes,
                    history.len()
                ),
                best_error: best,
            });
        }
        let p = partition(&contour, delta)?;
        let r = riemann_sum_rational(f, &p, opts.rule)?;
        let err = sup_error(f, &r, k)?;
        history.push((delta, err));
        best = best.min(err);
        if err < eps {
            return Ok(RungeResult {
                rational: r,
                error: err,
                delta,
                contour,
                history,
            });
        }
        delta /= 2.0;
    }
    Err(Error::Convergence {
        message: format!("no success within {} halvings", opts.max_halvings),
        best_error: best,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PfrJson {
    poles: Vec<[f64; 2]>,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<PfrJson> for PartialFractionRational {
    type Error = Error;
    fn try_from(j: PfrJson) -> Result<Self> {
        let c = |v: Vec<[f64; 2]>| v.into_iter().map(|[x, y]| C64::new(x, y)).collect();
        PartialFractionRational::new(c(j.poles), c(j.coeffs))
    }
}

impl From<PartialFractionRational> for PfrJson {
    fn from(r: PartialFractionRational) -> Self {
        let c = |v: Vec<C64>| v.into_iter().map(|z| [z.re, z.im]).collect();
        PfrJson {
            poles: c(r.poles),
            coeffs: c(r.coeffs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::Shape;
    use crate::expr::FunctionExpr;
    use crate::numeric::c64;

    fn f1(src: &str) -> FunctionExpr {
        FunctionExpr::parse(src, 1).unwrap()
    }

    fn unit_square_partition(delta: f64) -> ContourPartition {
        let g = PolygonalContour::rectangle(c64(-0.5, -0.5), c64(0.5, 0.5), 0.0).unwrap();
        partition(&g, delta).unwrap()
    }

    #[test]
    fn zero_function_gives_zero_rational() {
        let p = unit_square_partition(0.1);
        let r = riemann_sum_rational(&f1("0"), &p, QuadratureRule::Trapezoid).unwrap();
        assert!(r.coeffs().iter().all(|a| *a == c64(0.0, 0.0)));
        assert_eq!(r.eval_at(c64(0.1, 0.2)).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn constant_reproduced_inside() {
        let p = unit_square_partition(1e-3);
        for rule in [QuadratureRule::Trapezoid, QuadratureRule::TerminalPoint] {
            let r = riemann_sum_rational(&f1("1"), &p, rule).unwrap();
            assert!((r.eval_at(c64(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-3);
        }
        let r = riemann_sum_rational(&f1("1"), &p, QuadratureRule::Trapezoid).unwrap();
        assert_eq!(r.poles(), p.nodes());
    }

    #[test]
    fn node_failure_names_node() {
        let p = unit_square_partition(0.3);
        match riemann_sum_rational(&f1("1/(z-0.5)"), &p, QuadratureRule::Trapezoid) {
            Err(Error::PoleProximity { point, .. }) => {
                assert!((point[0] - c64(0.5, 0.0)).norm() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exp_on_segment() {
        let k = CompactNet::from_shape(
            &Shape::Segment {
                a: c64(-1.0, 0.0),
                b: c64(1.0, 0.0),
            },
            0.01,
        )
        .unwrap();
        let f = f1("exp(z)");
        let out = approximate(&f, &k, 0.5, 1e-8, &RungeOptions::default()).unwrap();
        // independent recomputation of the error by direct evaluation
        let oracle = k
            .points()
            .map(|x| (x[0].exp() - out.rational.eval_at(x[0]).unwrap()).norm())
            .fold(0.0, f64::max);
        assert_eq!(oracle.to_bits(), out.error.to_bits());
        assert!(out.error < 1e-8);
        let s = 0.5 / 8.0;
        let d = k
            .points()
            .map(|x| out.rational.pole_distance(x[0]))
            .fold(f64::INFINITY, f64::min);
        assert!(d >= s / 2.0);
    }

    #[test]
    fn bad_targets_rejected() {
        let k = CompactNet::from_points(vec![vec![c64(0.0, 0.0)]], 0.01).unwrap();
        for eps in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                approximate(&f1("z"), &k, 0.5, eps, &RungeOptions::default()),
                Err(Error::Argument(_))
            ));
        }
        let log = f1("log(z+2)");
        assert!(approximate(&log, &k, 0.5, 1e-3, &RungeOptions::default()).is_err());
        assert!(approximate(
            &log.assert_holomorphic(),
            &k,
            0.5,
            1e-3,
            &RungeOptions::default()
        )
        .is_ok());
    }

    #[test]
    fn budget_exhaustion_reports_best_error() {
        let k = CompactNet::from_points(vec![vec![c64(0.0, 0.0)]], 0.01).unwrap();
        let opts = RungeOptions {
            max_nodes: 200,
            ..RungeOptions::default()
        };
        match approximate(&f1("1/(z-0.6)"), &k, 0.5, 1e-14, &opts) {
            Err(Error::Convergence { best_error, .. }) => {
                assert!(best_error.is_finite() && best_error > 0.0)
            }
            other => panic!("{other:?}"),
        }
        let opts = RungeOptions {
            max_halvings: 0,
            ..RungeOptions::default()
        };
        assert!(matches!(
            approximate(&f1("1/(z-0.6)"), &k, 0.5, 1e-14, &opts),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn sup_error_examples() {
        let p = unit_square_partition(0.05);
        let r = riemann_sum_rational(&f1("z^2"), &p, QuadratureRule::Trapezoid).unwrap();
        let k = CompactNet::from_shape(
            &Shape::Disk {
                center: c64(0.0, 0.0),
                radius: 0.2,
            },
            0.05,
        )
        .unwrap();
        assert_eq!(sup_error(&r, &r, &k).unwrap(), 0.0);
        let x0 = c64(0.1, -0.05);
        let single = CompactNet::from_points(vec![vec![x0]], 0.01).unwrap();
        let direct = (x0 * x0 - r.eval_at(x0).unwrap()).norm();
        assert_eq!(sup_error(&f1("z^2"), &r, &single).unwrap(), direct);
        let on_pole = CompactNet::from_points(vec![vec![p.nodes()[0]]], 0.01).unwrap();
        assert!(matches!(
            sup_error(&f1("z"), &r, &on_pole),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let r = PartialFractionRational::new(vec![c64(1.0, 2.0)], vec![c64(0.5, -0.25)]).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"poles":[[1.0,2.0]],"coeffs":[[0.5,-0.25]]}"#);
        assert_eq!(
            serde_json::from_str::<PartialFractionRational>(&s).unwrap(),
            r
        );
        assert!(serde_json::from_str::<PartialFractionRational>(
            r#"{"poles":[[1,2]],"coeffs":[]}"#
        )
        .is_err());
    }
}
