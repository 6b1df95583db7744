//! Polygonal contours around plane compacts, their partitions, and
//! discretized Cauchy integrals.
//!
//! The contour is the oriented boundary of a union of closed grid squares
//! covering a fattening of K. Holes in the union come out clockwise, so the
//! region is always on the left of every cycle.

mod build;

pub use build::{build_contour, Neighborhood};

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::numeric::{ComplexMap, C64};

/// Weights used to turn node values into a contour integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Trapezoid weights on the terminal nodes: w_j = (c_j + c_{j+1})/2.
    /// Second order; the default.
    #[default]
    Trapezoid,
    /// Plain terminal-point Riemann sum: w_j = c_j = ζ_j − ζ_{j−1}.
    /// First order.
    TerminalPoint,
}

/// Closed polygonal cycles. Every cycle is stored closed (first vertex
/// repeated at the end).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ContourJson", into = "ContourJson")]
pub struct PolygonalContour {
    cycles: Vec<Vec<C64>>,
    /// Guaranteed distance between the contour and the compact it was built
    /// around; evaluation points closer than this are refused.
    clearance: f64,
}

impl PolygonalContour {
    pub fn from_cycles(cycles: Vec<Vec<C64>>, clearance: f64) -> Result<Self> {
        if cycles.is_empty() {
            return Err(Error::Geometry("contour needs at least one cycle".into()));
        }
        if !(clearance >= 0.0 && clearance.is_finite()) {
            return Err(Error::arg("clearance must be finite and nonnegative"));
        }
        let mut closed = Vec::with_capacity(cycles.len());
        for mut c in cycles {
            if c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::Geometry("contour vertices must be finite".into()));
            }
            if c.len() >= 2 && c.first() == c.last() {
                c.pop();
            }
            if c.len() < 3 {
                return Err(Error::Geometry(
                    "a cycle needs at least three vertices".into(),
                ));
            }
            c.push(c[0]);
            closed.push(c);
        }
        let contour = PolygonalContour {
            cycles: closed,
            clearance,
        };
        if contour.length() <= 0.0 {
            return Err(Error::Geometry("contour has zero length".into()));
        }
        Ok(contour)
    }

    /// Counter-clockwise rectangle with the given corners.
    pub fn rectangle(lo: C64, hi: C64, clearance: f64) -> Result<Self> {
        if !(lo.re < hi.re && lo.im < hi.im) {
            return Err(Error::Geometry("rectangle corners out of order".into()));
        }
        PolygonalContour::from_cycles(
            vec![vec![lo, C64::new(hi.re, lo.im), hi, C64::new(lo.re, hi.im)]],
            clearance,
        )
    }

    pub fn cycles(&self) -> &[Vec<C64>] {
        &self.cycles
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    fn edges(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        self.cycles
            .iter()
            .flat_map(|c| c.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.cycles.iter().map(|c| c.len() - 1).sum()
    }

    /// Distance from `z` to the nearest point of the contour.
    pub fn distance_to(&self, z: C64) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(z, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Exact winding number of the polygon around `z` (sum of turning
    /// angles). `z` must not lie on the contour.
    pub fn winding_number(&self, z: C64) -> i64 {
        let total: f64 = self.edges().map(|(a, b)| ((b - z) / (a - z)).arg()).sum();
        (total / TAU).round() as i64
    }

    /// Smallest distance between two different cycles (∞ for one cycle).
    pub fn min_cycle_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, ci) in self.cycles.iter().enumerate() {
            for cj in &self.cycles[i + 1..] {
                for w in ci.windows(2) {
                    for v in cj.windows(2) {
                        best = best.min(segment_pair_distance(w[0], w[1], v[0], v[1]));
                    }
                }
            }
        }
        best
    }
}

pub(crate) fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0)
    };
    (z - (a + d * t)).norm()
}

fn segment_pair_distance(a: C64, b: C64, c: C64, d: C64) -> f64 {
    // nonintersecting segments attain their distance at an endpoint
    let cross = |o: C64, p: C64, q: C64| ((p - o).conj() * (q - o)).im;
    let straddle = |a, b, c, d| cross(a, b, c).signum() * cross(a, b, d).signum() < 0.0;
    if straddle(a, b, c, d) && straddle(c, d, a, b) {
        return 0.0;
    }
    segment_distance(a, c, d)
        .min(segment_distance(b, c, d))
        .min(segment_distance(c, a, b))
        .min(segment_distance(d, a, b))
}

/// Subdivision of a contour into pieces of length < δ. Node j is the
/// terminal point of piece j; `chords[j] = ζ_j − ζ_{j−1}` within its cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPartition {
    nodes: Vec<C64>,
    chords: Vec<C64>,
    /// Index of the first node of each cycle, plus a final sentinel.
    cycle_starts: Vec<usize>,
    delta: f64,
    clearance: f64,
}

/// Split every edge of length ℓ into ⌊ℓ/δ⌋ + 1 equal pieces.
pub fn partition(contour: &PolygonalContour, delta: f64) -> Result<ContourPartition> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg(format!(
            "delta must be positive and finite, got {delta}"
        )));
    }
    let mut nodes = Vec::new();
    let mut cycle_starts = vec![0];
    for cycle in &contour.cycles {
        for w in cycle.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = (b - a).norm();
            if len == 0.0 {
                continue;
            }
            let pieces = (len / delta).floor() as usize + 1;
            for t in 1..=pieces {
                nodes.push(if t == pieces {
                    b
                } else {
                    a + (b - a) * (t as f64 / pieces as f64)
                });
            }
        }
        cycle_starts.push(nodes.len());
    }
    let mut chords = vec![C64::new(0.0, 0.0); nodes.len()];
    for c in cycle_starts.windows(2) {
        let (s, e) = (c[0], c[1]);
        for j in s..e {
            let prev = if j == s { nodes[e - 1] } else { nodes[j - 1] };
            chords[j] = nodes[j] - prev;
        }
    }
    Ok(ContourPartition {
        nodes,
        chords,
        cycle_starts,
        delta,
        clearance: contour.clearance,
    })
}

impl ContourPartition {
    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn chords(&self) -> &[C64] {
        &self.chords
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    /// Start point of piece j.
    pub fn segment_start(&self, j: usize) -> C64 {
        self.nodes[j] - self.chords[j]
    }

    /// Quadrature weights w_j with ∫_Γ g dζ ≈ Σ_j w_j g(ζ_j).
    pub fn weights(&self, rule: QuadratureRule) -> Vec<C64> {
        match rule {
            QuadratureRule::TerminalPoint => self.chords.clone(),
            QuadratureRule::Trapezoid => {
                let mut w = vec![C64::new(0.0, 0.0); self.nodes.len()];
                for c in self.cycle_starts.windows(2) {
                    let (s, e) = (c[0], c[1]);
                    for (j, wj) in (s..e).zip(&mut w[s..e]) {
                        let next = if j + 1 == e { s } else { j + 1 };
                        *wj = (self.chords[j] + self.chords[next]) * 0.5;
                    }
                }
                w
            }
        }
    }

    /// Distance from z to the polygon through the nodes.
    pub fn distance_to(&self, z: C64) -> f64 {
        (0..self.nodes.len())
            .map(|j| segment_distance(z, self.segment_start(j), self.nodes[j]))
            .fold(f64::INFINITY, f64::min)
    }

    fn check_clearance(&self, z: C64) -> Result<()> {
        let d = self.distance_to(z);
        if d < self.clearance || d == 0.0 {
            return Err(Error::PoleProximity {
                point: vec![z],
                modulus: d,
            });
        }
        Ok(())
    }

    /// Cauchy-weighted node values a_j = w_j f(ζ_j) / 2πi, in node order.
    pub fn cauchy_coefficients<F: ComplexMap + ?Sized>(
        &self,
        f: &F,
        rule: QuadratureRule,
    ) -> Result<Vec<C64>> {
        Error::check_dim(1, f.dim())?;
        let w = self.weights(rule);
        let two_pi_i = C64::new(0.0, TAU);
        exec::try_map_range(self.nodes.len(), |j| {
            let v = f.eval(&[self.nodes[j]])?;
            Ok(w[j] * v / two_pi_i)
        })
    }
}

/// Σ_j a_j / (ζ_j − z), summed in node order.
pub(crate) fn sum_partial_fractions(nodes: &[C64], coeffs: &[C64], z: C64) -> C64 {
    nodes.iter().zip(coeffs).map(|(&p, &a)| a / (p - z)).sum()
}

/// Discretized Cauchy integral (1/2πi) Σ_j w_j f(ζ_j)/(ζ_j − z).
pub fn cauchy_eval<F: ComplexMap + ?Sized>(
    f: &F,
    p: &ContourPartition,
    z: C64,
    rule: QuadratureRule,
) -> Result<C64> {
    p.check_clearance(z)?;
    let a = p.cauchy_coefficients(f, rule)?;
    Ok(sum_partial_fractions(&p.nodes, &a, z))
}

/// Batch version of [`cauchy_eval`]; node values are computed once.
pub fn cauchy_eval_many<F: ComplexMap + ?Sized>(
    f: &F,
    p: &ContourPartition,
    zs: &[C64],
    rule: QuadratureRule,
) -> Result<Vec<C64>> {
    for &z in zs {
        p.check_clearance(z)?;
    }
    let a = p.cauchy_coefficients(f, rule)?;
    Ok(exec::map(zs, |&z| sum_partial_fractions(&p.nodes, &a, z)))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContourJson {
    cycles: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    clearance: f64,
}

impl TryFrom<ContourJson> for PolygonalContour {
    type Error = Error;
    fn try_from(j: ContourJson) -> Result<Self> {
        let cycles = j
            .cycles
            .into_iter()
            .map(|c| c.into_iter().map(|[x, y]| C64::new(x, y)).collect())
            .collect();
        PolygonalContour::from_cycles(cycles, j.clearance)
    }
}

impl From<PolygonalContour> for ContourJson {
    fn from(c: PolygonalContour) -> Self {
        ContourJson {
            cycles: c
                .cycles
                .into_iter()
                .map(|cy| cy.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            clearance: c.clearance,
        }
    }
}

#[cfg(test)]
mod tests;
