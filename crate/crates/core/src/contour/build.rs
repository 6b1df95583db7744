use std::collections::{BTreeMap, BTreeSet};

use super::PolygonalContour;
use crate::compact::CompactNet;
use crate::error::{Error, Result};
use crate::exec;
use crate::numeric::C64;

/// The open set U in which the contour must lie.
#[derive(Debug, Clone, PartialEq)]
pub enum Neighborhood {
    /// Points within distance ρ of K.
    Margin(f64),
    /// The plane minus a finite forbidden set; squares keep distance ≥ s
    /// from it.
    Forbidden(Vec<C64>),
}

type Cell = (i64, i64);

/// Boundary of the union of grid squares of side `cell` (default ρ/8) that
/// meet the (h + s/2)-fattening of the net, where h is the net mesh.
///
/// Since the true compact lies within h of its net, every point of it stays
/// at least s/2 away from the returned contour. Diagonal-only contacts
/// between squares are filled in so that the boundary cycles are simple
/// and pairwise disjoint.
pub fn build_contour(
    k: &CompactNet,
    nbhd: &Neighborhood,
    cell: Option<f64>,
) -> Result<PolygonalContour> {
    Error::check_dim(1, k.dim())?;
    let pts: Vec<C64> = k.points().map(|p| p[0]).collect();
    let rho = match nbhd {
        Neighborhood::Margin(r) => {
            if !(*r > 0.0 && r.is_finite()) {
                return Err(Error::arg(format!(
                    "margin must be positive and finite, got {r}"
                )));
            }
            *r
        }
        Neighborhood::Forbidden(f) => {
            if f.is_empty() {
                return Err(Error::arg("forbidden set must be nonempty"));
            }
            let d = f
                .iter()
                .flat_map(|q| pts.iter().map(move |p| (p - q).norm()))
                .fold(f64::INFINITY, f64::min);
            if d == 0.0 {
                return Err(Error::Geometry("compact meets the forbidden set".into()));
            }
            d
        }
    };
    let s = cell.unwrap_or(rho / 8.0);
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::arg(format!("cell size must be positive, got {s}")));
    }
    if s > rho / 4.0 {
        return Err(Error::Geometry(format!(
            "cell size {s} too large: need s <= {} (a quarter of the neighbourhood width)",
            rho / 4.0
        )));
    }

    let fat = k.mesh() + s / 2.0;
    let mut cells = BTreeSet::new();
    for p in &pts {
        let (i0, i1) = (
            ((p.re - fat) / s).floor() as i64,
            ((p.re + fat) / s).floor() as i64,
        );
        let (j0, j1) = (
            ((p.im - fat) / s).floor() as i64,
            ((p.im + fat) / s).floor() as i64,
        );
        for i in i0..=i1 {
            for j in j0..=j1 {
                if cell_point_distance((i, j), s, *p) <= fat {
                    cells.insert((i, j));
                }
            }
        }
    }

    let admissible = |c: Cell| -> bool {
        match nbhd {
            Neighborhood::Margin(_) => {
                let center = cell_center(c, s);
                let d = pts
                    .iter()
                    .map(|p| (p - center).norm())
                    .fold(f64::INFINITY, f64::min);
                d + s * std::f64::consts::FRAC_1_SQRT_2 <= rho - s
            }
            Neighborhood::Forbidden(f) => f.iter().all(|q| cell_point_distance(c, s, *q) >= s),
        }
    };
    let list: Vec<Cell> = cells.iter().copied().collect();
    let bad = exec::filter_indices(list.len(), |i| !admissible(list[i]));
    if let Some(&i) = bad.first() {
        return Err(Error::Geometry(format!(
            "grid square at {:?} leaves the neighbourhood; use a smaller cell or a finer net",
            cell_center(list[i], s)
        )));
    }

    fill_pinches(&mut cells, &admissible)?;
    let cycles = trace_boundary(&cells, s);
    PolygonalContour::from_cycles(cycles, s / 2.0)
}

fn cell_center((i, j): Cell, s: f64) -> C64 {
    C64::new((i as f64 + 0.5) * s, (j as f64 + 0.5) * s)
}

fn cell_point_distance((i, j): Cell, s: f64, p: C64) -> f64 {
    let gap = |x: f64, k: i64| (k as f64 * s - x).max(x - (k + 1) as f64 * s).max(0.0);
    gap(p.re, i).hypot(gap(p.im, j))
}

/// Where two squares touch only at a corner, add one of the two squares
/// completing the 2×2 block.
fn fill_pinches(cells: &mut BTreeSet<Cell>, admissible: &dyn Fn(Cell) -> bool) -> Result<()> {
    loop {
        let mut added = false;
        let snapshot: Vec<Cell> = cells.iter().copied().collect();
        // every 2×2 block containing a square, keyed by its lower-left cell
        let blocks: BTreeSet<Cell> = snapshot
            .iter()
            .flat_map(|&(i, j)| [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)])
            .collect();
        for (i, j) in blocks {
            let a = (i, j);
            let b = (i + 1, j);
            let c = (i, j + 1);
            let d = (i + 1, j + 1);
            let has = |x: Cell| cells.contains(&x);
            let candidates = if has(a) && has(d) && !has(b) && !has(c) {
                [b, c]
            } else if has(b) && has(c) && !has(a) && !has(d) {
                [a, d]
            } else {
                continue;
            };
            match candidates.into_iter().find(|&x| admissible(x)) {
                Some(x) => {
                    cells.insert(x);
                    added = true;
                }
                None => {
                    return Err(Error::Geometry(
                        "squares touch diagonally and cannot be joined inside the neighbourhood"
                            .into(),
                    ))
                }
            }
        }
        if !added {
            return Ok(());
        }
    }
}

/// Chain the exposed square edges into closed cycles with the region on the
/// left, then drop collinear intermediate vertices.
fn trace_boundary(cells: &BTreeSet<Cell>, s: f64) -> Vec<Vec<C64>> {
    let mut next: BTreeMap<Cell, Cell> = BTreeMap::new();
    for &(i, j) in cells {
        let has = |x: Cell| cells.contains(&x);
        if !has((i, j - 1)) {
            next.insert((i, j), (i + 1, j));
        }
        if !has((i + 1, j)) {
            next.insert((i + 1, j), (i + 1, j + 1));
        }
        if !has((i, j + 1)) {
            next.insert((i + 1, j + 1), (i, j + 1));
        }
        if !has((i - 1, j)) {
            next.insert((i, j + 1), (i, j));
        }
    }
    let mut cycles = Vec::new();
    while let Some((&start, _)) = next.iter().next() {
        let mut cycle = vec![start];
        let mut v = next.remove(&start).expect("present");
        while v != start {
            cycle.push(v);
            v = next.remove(&v).expect("boundary edges form closed cycles");
        }
        cycles.push(simplify(&cycle, s));
    }
    cycles
}

fn simplify(cycle: &[Cell], s: f64) -> Vec<C64> {
    let n = cycle.len();
    let dir = |a: Cell, b: Cell| (b.0 - a.0, b.1 - a.1);
    (0..n)
        .filter(|&k| {
            let prev = cycle[(k + n - 1) % n];
            let next = cycle[(k + 1) % n];
            dir(prev, cycle[k]) != dir(cycle[k], next)
        })
        .map(|k| C64::new(cycle[k].0 as f64 * s, cycle[k].1 as f64 * s))
        .collect()
}
