//! Outer grid approximations of polynomially and rationally convex hulls.
//!
//! A candidate point z survives when |p(z)| ≤ (1+η)·max_K |p| for every
//! member p of a finite polynomial family. The points of K are always
//! candidates, so the result contains K.

use std::collections::HashMap;

use crate::compact::{hausdorff, max_abs_on, CompactNet};
use crate::error::{Error, Result};
use crate::exec;
use crate::numeric::{singularity_distance, BoxRegion, DenseFamily, RationalFunction, C64};

/// Refuse candidate grids larger than this.
pub const MAX_GRID_POINTS: usize = 4_000_000;
pub const DEFAULT_SLACK: f64 = 1e-9;
/// Members per block in the candidate sweep (~128 KiB for a cubic in C).
const MEMBER_BLOCK: usize = 2048;

/// Lattice of multiples of `res` inside a box in C^n ≅ R^(2n).
#[derive(Debug, Clone)]
pub struct CandidateGrid {
    region: BoxRegion,
    res: f64,
    /// Per real axis: integer range of lattice indices.
    ranges: Vec<(i64, i64)>,
}

impl CandidateGrid {
    pub fn new(region: BoxRegion, res: f64) -> Result<Self> {
        if !(res > 0.0 && res.is_finite()) {
            return Err(Error::arg(format!(
                "grid resolution must be positive, got {res}"
            )));
        }
        let ranges: Vec<(i64, i64)> = (0..2 * region.dim())
            .map(|k| {
                let (lo, hi) = region.real_bounds(k);
                ((lo / res).ceil() as i64, (hi / res).floor() as i64)
            })
            .collect();
        let size = ranges
            .iter()
            .map(|(a, b)| (b - a + 1).max(0) as f64)
            .product::<f64>();
        if size > MAX_GRID_POINTS as f64 {
            return Err(Error::ResourceBudget {
                size: size as u128,
                cap: MAX_GRID_POINTS,
            });
        }
        Ok(CandidateGrid {
            region,
            res,
            ranges,
        })
    }

    /// Grid over the bounding box of K padded by 2h + res.
    pub fn around(k: &CompactNet, res: f64) -> Result<Self> {
        CandidateGrid::new(k.bounding_box().expand(2.0 * k.mesh() + res), res)
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn resolution(&self) -> f64 {
        self.res
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn len(&self) -> usize {
        self.ranges
            .iter()
            .map(|(a, b)| (b - a + 1).max(0) as usize)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `idx` in row-major order, last real axis fastest.
    pub fn point(&self, mut idx: usize) -> Vec<C64> {
        let mut re = vec![0.0; self.ranges.len()];
        for (k, (a, b)) in self.ranges.iter().enumerate().rev() {
            let w = (b - a + 1) as usize;
            re[k] = (a + (idx % w) as i64) as f64 * self.res;
            idx /= w;
        }
        re.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
    }

    pub fn points(&self) -> Vec<Vec<C64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// How much a candidate may exceed the net maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slack {
    /// Same η for every member.
    Fixed(f64),
    /// η + L_p·h / max_K |p| per member, where L_p bounds the gradient of p
    /// on the padded bounding box of K and h is the net mesh. Compensates for
    /// measuring the maximum on a net instead of the compact itself.
    NetCompensated(f64),
}

impl Default for Slack {
    fn default() -> Self {
        Slack::Fixed(DEFAULT_SLACK)
    }
}

impl Slack {
    fn base(self) -> f64 {
        match self {
            Slack::Fixed(e) | Slack::NetCompensated(e) => e,
        }
    }
}

/// max_K |p| for every member, in family order.
pub fn member_maxima(family: &DenseFamily, k: &CompactNet) -> Result<Vec<f64>> {
    let all: Vec<usize> = (0..family.len()).collect();
    maxima_of(family, k, &all)
}

fn maxima_of(family: &DenseFamily, k: &CompactNet, members: &[usize]) -> Result<Vec<f64>> {
    Error::check_dim(family.dim(), k.dim())?;
    let values: Vec<Vec<C64>> = k.points().map(|x| family.monomial_values(x)).collect();
    Ok(exec::map(members, |&i| {
        values
            .iter()
            .map(|v| family.eval_row(i, v).norm_sqr())
            .fold(0.0, f64::max)
            .sqrt()
    }))
}

const MAX_DENOMINATOR: i64 = 64;
const MAX_NUMERATOR: f64 = (1u64 << 24) as f64;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Smallest d with d·x integral, if small.
fn denominator(x: f64) -> Option<i64> {
    (1..=MAX_DENOMINATOR).find(|&d| {
        let y = x * d as f64;
        y.abs() < MAX_NUMERATOR && y == y.round() && y.round() / d as f64 == x
    })
}

/// Exact key shared by rows that are complex multiples of each other, for
/// rows of Gaussian rationals with small denominators. Scaling by
/// conj(first nonzero entry) leaves only a positive real factor, removed by
/// the gcd of the integer parts.
fn projective_key(row: &[C64]) -> Option<Vec<(i64, i64)>> {
    let mut lcm = 1i64;
    for c in row {
        for x in [c.re, c.im] {
            let d = denominator(x)?;
            lcm = lcm / gcd(lcm, d) * d;
            if lcm > MAX_DENOMINATOR {
                return None;
            }
        }
    }
    let ints: Vec<(i64, i64)> = row
        .iter()
        .map(|c| {
            (
                (c.re * lcm as f64).round() as i64,
                (c.im * lcm as f64).round() as i64,
            )
        })
        .collect();
    let &(a, b) = ints.iter().find(|&&c| c != (0, 0))?;
    // (x + iy)(a − ib)
    let w: Vec<(i64, i64)> = ints
        .iter()
        .map(|&(x, y)| (x * a + y * b, y * a - x * b))
        .collect();
    let g = w.iter().fold(0, |g, &(x, y)| gcd(gcd(g, x), y));
    Some(w.into_iter().map(|(x, y)| (x / g, y / g)).collect())
}

/// First member of every class of complex multiples among `members`. Both
/// slack rules scale with |λ| under p ↦ λp, so one member per class imposes
/// every constraint of the class.
fn class_representatives(family: &DenseFamily, members: &[usize]) -> Vec<usize> {
    let keys = exec::map(members, |&i| projective_key(family.row(i)));
    let mut seen = HashMap::new();
    members
        .iter()
        .zip(keys)
        .filter(|(_, key)| match key {
            Some(key) => seen.insert(key.clone(), ()).is_none(),
            None => true,
        })
        .map(|(&i, _)| i)
        .collect()
}

/// Gradient bound sqrt(Σ_j (Σ_α |c_α| α_j R^{|α|−1})²) on the box where every
/// coordinate has modulus ≤ R.
fn gradient_bound(family: &DenseFamily, i: usize, r: f64) -> f64 {
    let n = family.dim();
    let mut per_axis = vec![0.0; n];
    for (alpha, c) in family.monomials().iter().zip(family.row(i)) {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let deg = alpha.degree();
        for (j, &e) in alpha.exponents().iter().enumerate() {
            if e > 0 {
                per_axis[j] += c.norm() * e as f64 * r.powi(deg as i32 - 1);
            }
        }
    }
    per_axis.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Thresholds for `members`, in the same order.
fn thresholds(
    family: &DenseFamily,
    members: &[usize],
    reference: &CompactNet,
    slack: Slack,
) -> Result<Vec<f64>> {
    let eta = slack.base();
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::arg(format!(
            "slack must be finite and nonnegative, got {eta}"
        )));
    }
    let maxima = maxima_of(family, reference, members)?;
    Ok(match slack {
        Slack::Fixed(_) => maxima.iter().map(|m| (1.0 + eta) * m).collect(),
        Slack::NetCompensated(_) => {
            let r = reference
                .bounding_box()
                .expand(reference.mesh())
                .max_coord_modulus();
            let h = reference.mesh();
            maxima
                .iter()
                .zip(members)
                .map(|(&m, &i)| (1.0 + eta) * m + gradient_bound(family, i, r) * h)
                .collect()
        }
    })
}

/// Survival flag per candidate, with maxima taken over `reference`.
pub fn filter_candidates(
    candidates: &[Vec<C64>],
    reference: &CompactNet,
    family: &DenseFamily,
    slack: Slack,
) -> Result<Vec<bool>> {
    if family.is_empty() {
        return Err(Error::arg("empty polynomial family"));
    }
    for c in candidates {
        Error::check_dim(family.dim(), c.len())?;
    }
    // constants can never exclude a point
    let active: Vec<usize> = (0..family.len())
        .filter(|&i| family.degree(i) > 0)
        .collect();
    let active = class_representatives(family, &active);
    // compared against |p(z)|², which avoids a hypot per evaluation
    let limits: Vec<f64> = thresholds(family, &active, reference, slack)?
        .iter()
        .map(|t| t * t)
        .collect();
    let width = family.monomials().len();
    let rows: Vec<C64> = active
        .iter()
        .flat_map(|&i| family.row(i).iter().copied())
        .collect();
    let values: Vec<Vec<C64>> = exec::map(candidates, |z| family.monomial_values(z));
    // Sweep cache-sized blocks of members over the candidates still alive,
    // instead of streaming the whole family once per candidate.
    let mut alive = vec![true; candidates.len()];
    for (block, lims) in rows
        .chunks(MEMBER_BLOCK * width)
        .zip(limits.chunks(MEMBER_BLOCK))
    {
        let live: Vec<usize> = (0..alive.len()).filter(|&c| alive[c]).collect();
        let ok = exec::map(&live, |&c| {
            let v = &values[c];
            block.chunks(width).zip(lims).all(|(row, &limit)| {
                let mut acc = C64::new(0.0, 0.0);
                for (a, b) in row.iter().zip(v) {
                    if a.re != 0.0 || a.im != 0.0 {
                        acc += a * b;
                    }
                }
                acc.norm_sqr() <= limit
            })
        });
        for (c, ok) in live.into_iter().zip(ok) {
            alive[c] = ok;
        }
    }
    Ok(alive)
}

fn check_grid(k: &CompactNet, grid: &CandidateGrid) -> Result<()> {
    Error::check_dim(k.dim(), grid.dim())?;
    if !k.points().all(|p| grid.region().contains(p)) {
        return Err(Error::arg(
            "candidate grid box does not contain the compact",
        ));
    }
    Ok(())
}

/// Grid points first (grid order), then the points of K.
fn candidates(k: &CompactNet, grid: &CandidateGrid) -> Vec<Vec<C64>> {
    let mut c = grid.points();
    c.extend(k.points().map(<[C64]>::to_vec));
    c
}

fn collect(dim: usize, cands: Vec<Vec<C64>>, keep: &[bool], res: f64) -> Result<CompactNet> {
    let coords: Vec<C64> = cands
        .into_iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .flat_map(|(p, _)| p)
        .collect();
    CompactNet::new(dim, coords, res)
}

/// Grid approximation of the polynomially convex hull; mesh = grid resolution.
pub fn poly_hull(
    k: &CompactNet,
    family: &DenseFamily,
    grid: &CandidateGrid,
    slack: Slack,
) -> Result<CompactNet> {
    check_grid(k, grid)?;
    let cands = candidates(k, grid);
    let keep = filter_candidates(&cands, k, family, slack)?;
    collect(k.dim(), cands, &keep, grid.resolution())
}

#[derive(Debug, Clone)]
pub struct RationalHull {
    pub hull: CompactNet,
    /// Rational functions skipped because their singular set comes within
    /// τ_sing of K.
    pub skipped: Vec<usize>,
}

/// Polynomial hull further cut down by rational functions regular on K.
///
/// A rational r = p/q with min_K |q| < τ_sing is skipped entirely. For the
/// others a point z is removed when |q(z)| < τ_pole·(1 + |p(z)|) or
/// |r(z)| > (1+η)·max_K |r|. Only the base η of `slack` applies to rationals.
pub fn rational_hull(
    k: &CompactNet,
    family: &DenseFamily,
    rationals: &[RationalFunction],
    grid: &CandidateGrid,
    slack: Slack,
    tau_sing: f64,
) -> Result<RationalHull> {
    check_grid(k, grid)?;
    if tau_sing.is_nan() || tau_sing < 0.0 {
        return Err(Error::arg("singularity threshold must be nonnegative"));
    }
    for r in rationals {
        Error::check_dim(k.dim(), r.dim())?;
    }
    let cands = candidates(k, grid);
    let mut keep = filter_candidates(&cands, k, family, slack)?;
    let eta = slack.base();
    let mut skipped = Vec::new();
    for (idx, r) in rationals.iter().enumerate() {
        if singularity_distance(r, k)? < tau_sing {
            skipped.push(idx);
            continue;
        }
        let limit = (1.0 + eta) * max_abs_on(k, r)?;
        // evaluation refuses points near the pole set: those are removed
        let survive = exec::map_range(cands.len(), |i| {
            keep[i] && r.eval(&cands[i]).is_ok_and(|v| v.norm() <= limit)
        });
        keep = survive;
    }
    Ok(RationalHull {
        hull: collect(k.dim(), cands, &keep, grid.resolution())?,
        skipped,
    })
}

/// Hausdorff distance between K and a hull approximation.
pub fn hull_defect(k: &CompactNet, hull: &CompactNet) -> Result<f64> {
    hausdorff(k, hull)
}
