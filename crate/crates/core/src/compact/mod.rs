//! Nonempty compact subsets of C^n represented by finite h-nets.

mod shapes;

pub use shapes::Shape;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::expr::{lipschitz_estimate, FunctionExpr};
use crate::numeric::{dist, dist_sq, BoxRegion, ComplexMap, C64};

/// Points closer than this (Euclidean, in R^(2n)) are merged.
pub const DEDUP_TOL: f64 = 1e-12;

/// A nonempty finite point set in C^n declared to be an h-net of some compact
/// set. `mesh` is metadata describing the intended fineness; it is not
/// verified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetJson", into = "NetJson")]
pub struct CompactNet {
    dim: usize,
    mesh: f64,
    /// Flat storage, `dim` coordinates per point.
    coords: Vec<C64>,
}

impl CompactNet {
    pub fn new(dim: usize, coords: Vec<C64>, mesh: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("net dimension must be >= 1"));
        }
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::arg(format!(
                "mesh must be positive and finite, got {mesh}"
            )));
        }
        if coords.is_empty() {
            return Err(Error::arg("compact net must be nonempty"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::arg(
                "coordinate count is not a multiple of the dimension",
            ));
        }
        if coords
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::arg("net points must be finite"));
        }
        Ok(CompactNet {
            dim,
            mesh,
            coords: dedup(dim, coords),
        })
    }

    pub fn from_points(points: Vec<Vec<C64>>, mesh: f64) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::arg("compact net must be nonempty"))?;
        for p in &points {
            Error::check_dim(dim, p.len())?;
        }
        CompactNet::new(dim, points.into_iter().flatten().collect(), mesh)
    }

    pub fn from_shape(shape: &Shape, h: f64) -> Result<Self> {
        shapes::make_net(shape, h)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn with_mesh(mut self, mesh: f64) -> Result<Self> {
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::arg("mesh must be positive and finite"));
        }
        self.mesh = mesh;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> &[C64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[C64]> + Clone {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn bounding_box(&self) -> BoxRegion {
        BoxRegion::bounding(self.dim, self.points()).expect("nonempty")
    }

    /// Distance from `z` to the nearest net point.
    pub fn distance_to(&self, z: &[C64]) -> f64 {
        self.points()
            .map(|p| dist_sq(p, z))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    /// Same point set (after deduplication), order-insensitive.
    pub fn same_points(&self, other: &CompactNet) -> bool {
        self.dim == other.dim
            && self.len() == other.len()
            && hausdorff(self, other).map(|d| d == 0.0).unwrap_or(false)
    }

    /// Every point of `self` is within `tol` of a point of `other`.
    pub fn is_subset_of(&self, other: &CompactNet, tol: f64) -> bool {
        self.dim == other.dim && directed(self, other).sqrt() <= tol
    }
}

fn dedup(dim: usize, coords: Vec<C64>) -> Vec<C64> {
    let n = coords.len() / dim;
    if n <= 1 {
        return coords;
    }
    let key = |i: usize| coords[i * dim].re;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    let tol_sq = DEDUP_TOL * DEDUP_TOL;
    let mut keep = vec![false; n];
    // kept points, in sorted order; window scan on the first coordinate
    let mut kept: Vec<usize> = Vec::new();
    let mut lo = 0;
    for &i in &order {
        let x = key(i);
        while lo < kept.len() && key(kept[lo]) < x - DEDUP_TOL {
            lo += 1;
        }
        let p = &coords[i * dim..(i + 1) * dim];
        let dup = kept[lo..]
            .iter()
            .any(|&j| dist_sq(&coords[j * dim..(j + 1) * dim], p) <= tol_sq);
        if !dup {
            keep[i] = true;
            kept.push(i);
        }
    }
    (0..n)
        .filter(|&i| keep[i])
        .flat_map(|i| coords[i * dim..(i + 1) * dim].iter().copied())
        .collect()
}

/// Squared directed distance sup_{a∈A} inf_{b∈B} |a−b|².
fn directed(a: &CompactNet, b: &CompactNet) -> f64 {
    let pts: Vec<&[C64]> = a.points().collect();
    exec::max(&pts, |p| {
        b.points()
            .map(|q| dist_sq(p, q))
            .fold(f64::INFINITY, f64::min)
    })
    .unwrap_or(0.0)
}

/// Exact Hausdorff distance between the two finite point sets.
pub fn hausdorff(a: &CompactNet, b: &CompactNet) -> Result<f64> {
    Error::check_dim(a.dim, b.dim)?;
    Ok(directed(a, b).max(directed(b, a)).sqrt())
}

/// Point union; mesh is the larger of the two.
pub fn union(a: &CompactNet, b: &CompactNet) -> Result<CompactNet> {
    Error::check_dim(a.dim, b.dim)?;
    let mut coords = a.coords.clone();
    coords.extend_from_slice(&b.coords);
    CompactNet::new(a.dim, coords, a.mesh.max(b.mesh))
}

/// max over the net of |f|, scanning points in net order.
pub fn max_abs_on<F: ComplexMap + ?Sized>(k: &CompactNet, f: &F) -> Result<f64> {
    Error::check_dim(f.dim(), k.dim)?;
    let pts: Vec<&[C64]> = k.points().collect();
    let vals = exec::try_map(&pts, |p| f.eval(p).map(|v| v.norm()))?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Pointwise image of the net under g = (g_1, …, g_m), a net in C^m.
///
/// The output mesh is L·h where L combines the finite-difference Lipschitz
/// estimates of the components over the bounding box of K (padded by h). If
/// a component has a pole inside that box the estimate falls back to
/// difference quotients between each net point and its nearest neighbour.
/// When L·h vanishes (constant map) the input mesh is kept.
pub fn image(k: &CompactNet, g: &[FunctionExpr]) -> Result<CompactNet> {
    if g.is_empty() {
        return Err(Error::arg("image needs at least one component"));
    }
    for gi in g {
        Error::check_dim(gi.dim(), k.dim)?;
    }
    let pts: Vec<&[C64]> = k.points().collect();
    let rows = exec::try_map(&pts, |p| {
        g.iter().map(|gi| gi.eval(p)).collect::<Result<Vec<C64>>>()
    })?;
    let lip = image_lipschitz(k, g, &rows)?;
    let mesh = match lip * k.mesh {
        m if m > 0.0 && m.is_finite() => m,
        _ => k.mesh,
    };
    CompactNet::new(g.len(), rows.into_iter().flatten().collect(), mesh)
}

fn image_lipschitz(k: &CompactNet, g: &[FunctionExpr], rows: &[Vec<C64>]) -> Result<f64> {
    let region = k.bounding_box().expand(k.mesh);
    let mut sum_sq = 0.0;
    for gi in g {
        match lipschitz_estimate(gi, &region) {
            Ok(l) => sum_sq += l * l,
            Err(Error::PoleProximity { .. }) | Err(Error::Domain(_)) => {
                return Ok(local_quotient(k, rows));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(sum_sq.sqrt())
}

fn local_quotient(k: &CompactNet, rows: &[Vec<C64>]) -> f64 {
    let n = k.len();
    if n < 2 {
        return 0.0;
    }
    let q = exec::map_range(n, |i| {
        let p = k.point(i);
        let (j, d) = (0..n)
            .filter(|&j| j != i)
            .map(|j| (j, dist(p, k.point(j))))
            .fold(
                (i, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            );
        dist(&rows[i], &rows[j]) / d
    });
    q.into_iter().fold(0.0, f64::max)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetJson {
    dim: usize,
    mesh: f64,
    points: Vec<Vec<f64>>,
}

impl TryFrom<NetJson> for CompactNet {
    type Error = Error;
    fn try_from(j: NetJson) -> Result<Self> {
        let mut coords = Vec::with_capacity(j.points.len() * j.dim);
        for (i, p) in j.points.iter().enumerate() {
            if p.len() != 2 * j.dim {
                return Err(Error::arg(format!(
                    "points[{i}] has {} reals, expected {} for dim {}",
                    p.len(),
                    2 * j.dim,
                    j.dim
                )));
            }
            coords.extend(p.chunks(2).map(|c| C64::new(c[0], c[1])));
        }
        CompactNet::new(j.dim, coords, j.mesh)
    }
}

impl From<CompactNet> for NetJson {
    fn from(k: CompactNet) -> Self {
        NetJson {
            dim: k.dim,
            mesh: k.mesh,
            points: k
                .points()
                .map(|p| p.iter().flat_map(|c| [c.re, c.im]).collect())
                .collect(),
        }
    }
}
