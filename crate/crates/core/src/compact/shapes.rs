use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::CompactNet;
use crate::error::{Error, Result};
use crate::numeric::C64;

/// Refuse to build nets larger than this many points.
pub const MAX_SHAPE_POINTS: usize = 4_000_000;

/// Simple shapes that can be discretized into nets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Disk {
        center: C64,
        radius: f64,
    },
    Circle {
        center: C64,
        radius: f64,
    },
    Segment {
        a: C64,
        b: C64,
    },
    Annulus {
        center: C64,
        inner: f64,
        outer: f64,
    },
    /// Product of the circles |z_j| = radii[j] in C^n.
    Torus {
        radii: Vec<f64>,
    },
    /// Axis-aligned box in R^(2n), corners given per complex coordinate.
    Box {
        lo: Vec<C64>,
        hi: Vec<C64>,
    },
    Points {
        points: Vec<Vec<C64>>,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn finite(name: &str, z: C64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("{name} must be finite")))
    }
}

fn budget(n: f64) -> Result<usize> {
    if n > MAX_SHAPE_POINTS as f64 {
        return Err(Error::ResourceBudget {
            size: n as u128,
            cap: MAX_SHAPE_POINTS,
        });
    }
    Ok(n as usize)
}

/// Uniform angular grid with ⌈2πr/h⌉ nodes, starting at angle 0.
fn circle_nodes(radius: f64, h: f64) -> Result<Vec<C64>> {
    let m = budget((TAU * radius / h).ceil().max(1.0))?;
    Ok((0..m)
        .map(|k| C64::from_polar(radius, TAU * k as f64 / m as f64))
        .collect())
}

/// Square grid of spacing h anchored at `center`, restricted to
/// r_in ≤ |z − c| ≤ r_out.
fn planar_grid(center: C64, r_in: f64, r_out: f64, h: f64) -> Result<Vec<C64>> {
    let k = (r_out / h).floor();
    budget((2.0 * k + 1.0).powi(2))?;
    let k = k as i64;
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            let d = C64::new(i as f64 * h, j as f64 * h);
            let r = d.norm();
            if r >= r_in && r <= r_out {
                out.push(center + d);
            }
        }
    }
    Ok(out)
}

pub(super) fn make_net(shape: &Shape, h: f64) -> Result<CompactNet> {
    positive("h", h)?;
    match shape {
        Shape::Disk { center, radius } => {
            finite("center", *center)?;
            positive("radius", *radius)?;
            let mut pts = planar_grid(*center, 0.0, *radius, h)?;
            pts.extend(circle_nodes(*radius, h)?.into_iter().map(|w| center + w));
            CompactNet::new(1, pts, h)
        }
        Shape::Circle { center, radius } => {
            finite("center", *center)?;
            positive("radius", *radius)?;
            let pts = circle_nodes(*radius, h)?
                .into_iter()
                .map(|w| center + w)
                .collect();
            CompactNet::new(1, pts, h)
        }
        Shape::Segment { a, b } => {
            finite("a", *a)?;
            finite("b", *b)?;
            let m = budget(((b - a).norm() / h).ceil())?;
            let pts = if m == 0 {
                vec![*a]
            } else {
                // endpoints exact; interior by linear interpolation
                (0..=m)
                    .map(|k| match k {
                        0 => *a,
                        k if k == m => *b,
                        k => a + (b - a) * (k as f64 / m as f64),
                    })
                    .collect()
            };
            CompactNet::new(1, pts, h)
        }
        Shape::Annulus {
            center,
            inner,
            outer,
        } => {
            finite("center", *center)?;
            positive("inner radius", *inner)?;
            positive("outer radius", *outer)?;
            if inner >= outer {
                return Err(Error::arg("annulus needs inner < outer"));
            }
            let mut pts = planar_grid(*center, *inner, *outer, h)?;
            for r in [*inner, *outer] {
                pts.extend(circle_nodes(r, h)?.into_iter().map(|w| center + w));
            }
            CompactNet::new(1, pts, h)
        }
        Shape::Torus { radii } => {
            if radii.is_empty() {
                return Err(Error::arg("torus needs at least one radius"));
            }
            let factors = radii
                .iter()
                .map(|&r| {
                    positive("torus radius", r)?;
                    circle_nodes(r, h)
                })
                .collect::<Result<Vec<_>>>()?;
            budget(factors.iter().map(|f| f.len() as f64).product())?;
            CompactNet::new(radii.len(), product(&factors), h)
        }
        Shape::Box { lo, hi } => {
            let region = crate::numeric::BoxRegion::new(lo.clone(), hi.clone())?;
            let n = region.dim();
            for z in lo.iter().chain(hi) {
                finite("box corner", *z)?;
            }
            // spacing so that every point of the box is within h of a node
            let step = h * (2.0 / n as f64).sqrt().min(1.0);
            let axes: Vec<Vec<f64>> = (0..2 * n)
                .map(|k| {
                    let (a, b) = region.real_bounds(k);
                    let m = ((b - a) / step).ceil() as usize;
                    if m == 0 {
                        vec![a]
                    } else {
                        (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
                    }
                })
                .collect();
            budget(axes.iter().map(|a| a.len() as f64).product())?;
            let factors: Vec<Vec<C64>> = axes
                .chunks(2)
                .map(|xy| {
                    xy[0]
                        .iter()
                        .flat_map(|&x| xy[1].iter().map(move |&y| C64::new(x, y)))
                        .collect()
                })
                .collect();
            CompactNet::new(n, product(&factors), h)
        }
        Shape::Points { points } => CompactNet::from_points(points.clone(), h),
    }
}

/// Cartesian product, last factor varying fastest; flat coordinates.
fn product(factors: &[Vec<C64>]) -> Vec<C64> {
    let n = factors.len();
    let total: usize = factors.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total * n);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        out.extend(idx.iter().zip(factors).map(|(&i, f)| f[i]));
        for j in (0..n).rev() {
            idx[j] += 1;
            if idx[j] < factors[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
    out
}
