//! Taylor, homogeneous and Laurent expansions about the origin, computed by
//! trapezoidal quadrature on the torus |ζ_j| = ρ_j.
//!
//! With ζ_j = ρ_j e^{2πi k_j/m}, the coefficient of ζ^ν is
//!
//! ```text
//! c_ν = (2πi)^{-n} ∫ f(ζ) ζ^{-ν-1} dζ = ρ^{-ν} m^{-n} Σ_k f(ζ_k) e^{-2πi k·ν/m}
//! ```
//!
//! which is exact for Laurent polynomials with |ν_j| < m/2.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::compact::CompactNet;
use crate::error::{Error, Result};
use crate::exec;
use crate::expr::FunctionExpr;
use crate::numeric::{ComplexMap, MultiIndex, Polynomial, C64};

pub const MIN_NODES: usize = 8;
pub const DEFAULT_NODES: usize = 128;
/// Largest torus grid (m^n samples) we are willing to evaluate.
pub const MAX_TORUS_SAMPLES: usize = 1 << 24;

/// Values of f on the uniform torus grid, last coordinate varying fastest.
#[derive(Debug, Clone)]
pub struct TorusSamples {
    radii: Vec<f64>,
    m: usize,
    values: Vec<C64>,
    /// e^{2πi r/m}, r = 0..m
    roots: Vec<C64>,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::arg("need at least one radius"));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::arg("radii must be positive and finite"));
    }
    Ok(())
}

impl TorusSamples {
    pub fn sample<F: ComplexMap + ?Sized>(f: &F, radii: &[f64], m: usize) -> Result<Self> {
        check_radii(radii)?;
        Error::check_dim(f.dim(), radii.len())?;
        if m < MIN_NODES {
            return Err(Error::arg(format!(
                "need at least {MIN_NODES} nodes per circle, got {m}"
            )));
        }
        let n = radii.len();
        let total = (m as u128).pow(n as u32);
        if total > MAX_TORUS_SAMPLES as u128 {
            return Err(Error::ResourceBudget {
                size: total,
                cap: MAX_TORUS_SAMPLES,
            });
        }
        let roots: Vec<C64> = (0..m)
            .map(|r| C64::from_polar(1.0, TAU * r as f64 / m as f64))
            .collect();
        let values = exec::try_map_range(total as usize, |mut idx| {
            let mut z = vec![C64::new(0.0, 0.0); n];
            for j in (0..n).rev() {
                z[j] = roots[idx % m] * radii[j];
                idx /= m;
            }
            f.eval(&z)
        })?;
        Ok(TorusSamples {
            radii: radii.to_vec(),
            m,
            values,
            roots,
        })
    }

    pub fn dim(&self) -> usize {
        self.radii.len()
    }

    pub fn nodes(&self) -> usize {
        self.m
    }

    pub fn coeff(&self, nu: &[i32]) -> Result<C64> {
        Error::check_dim(self.dim(), nu.len())?;
        let m = self.m;
        let n = self.dim();
        // phase index of e^{-2πi k ν/m} for coordinate j
        let shift: Vec<usize> = nu
            .iter()
            .map(|&v| (-(v as i64)).rem_euclid(m as i64) as usize)
            .collect();
        let inner = m.pow(n as u32 - 1);
        // outer coordinate in parallel, then a fixed-order reduction
        let partials = exec::map_range(m, |k0| {
            let w0 = self.roots[(k0 * shift[0]) % m];
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..inner {
                let mut w = w0;
                let mut idx = r;
                for j in (1..n).rev() {
                    w *= self.roots[((idx % m) * shift[j]) % m];
                    idx /= m;
                }
                acc += self.values[k0 * inner + r] * w;
            }
            acc
        });
        let sum: C64 = partials.into_iter().sum();
        let scale: f64 = self
            .radii
            .iter()
            .zip(nu)
            .map(|(r, &v)| r.powi(-v))
            .product::<f64>()
            / (m as f64).powi(n as i32);
        Ok(sum * scale)
    }
}

/// Single coefficient c_ν of f on the torus of the given radii.
pub fn coeff<F: ComplexMap + ?Sized>(f: &F, nu: &[i32], radii: &[f64], m: usize) -> Result<C64> {
    TorusSamples::sample(f, radii, m)?.coeff(nu)
}

/// Finite table of expansion coefficients indexed by integer multi-indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableJson", into = "TableJson")]
pub struct SeriesTable {
    dim: usize,
    radii: Vec<f64>,
    nodes: usize,
    entries: BTreeMap<Vec<i32>, C64>,
}

impl SeriesTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn get(&self, nu: &[i32]) -> Option<C64> {
        self.entries.get(nu).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[i32], C64)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest |ν|₁ present.
    pub fn order(&self) -> u32 {
        self.entries
            .keys()
            .map(|k| k.iter().map(|v| v.unsigned_abs()).sum())
            .max()
            .unwrap_or(0)
    }
}

/// All Taylor coefficients a_α with |α| ≤ d.
pub fn taylor_table<F: ComplexMap + ?Sized>(
    f: &F,
    d: u32,
    radii: &[f64],
    m: usize,
) -> Result<SeriesTable> {
    let samples = TorusSamples::sample(f, radii, m)?;
    let indices: Vec<Vec<i32>> = MultiIndex::all_up_to(radii.len(), d)
        .iter()
        .map(|a| a.exponents().iter().map(|&e| e as i32).collect())
        .collect();
    table_from(&samples, indices)
}

/// All Laurent coefficients c_ν with |ν_j| ≤ order for every j.
pub fn laurent_table<F: ComplexMap + ?Sized>(
    f: &F,
    order: u32,
    radii: &[f64],
    m: usize,
) -> Result<SeriesTable> {
    let samples = TorusSamples::sample(f, radii, m)?;
    table_from(&samples, box_indices(radii.len(), order as i32))
}

fn box_indices(n: usize, d: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-d..=d).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn table_from(samples: &TorusSamples, indices: Vec<Vec<i32>>) -> Result<SeriesTable> {
    let mut entries = BTreeMap::new();
    for nu in indices {
        let c = samples.coeff(&nu)?;
        entries.insert(nu, c);
    }
    Ok(SeriesTable {
        dim: samples.dim(),
        radii: samples.radii.clone(),
        nodes: samples.m,
        entries,
    })
}

/// P_0 + … + P_m, the degree-m Taylor partial sum.
pub fn homogeneous_sum(t: &SeriesTable, m: u32) -> Result<Polynomial> {
    let mut terms = Vec::new();
    for alpha in MultiIndex::all_up_to(t.dim, m) {
        let nu: Vec<i32> = alpha.exponents().iter().map(|&e| e as i32).collect();
        let c = t.get(&nu).ok_or_else(|| {
            Error::arg(format!(
                "table lacks coefficient {nu:?}; truncation order exceeded"
            ))
        })?;
        terms.push((alpha, c));
    }
    Polynomial::from_terms(t.dim, terms)
}

/// Only the degree-m homogeneous part P_m.
pub fn homogeneous_part(t: &SeriesTable, m: u32) -> Result<Polynomial> {
    Ok(homogeneous_sum(t, m)?.homogeneous_part(m))
}

/// Smallest m with sup_K |f − p_m| < ε, scanning up to the table's order.
pub fn compact_convergence_check<F: ComplexMap + ?Sized>(
    f: &F,
    t: &SeriesTable,
    k: &CompactNet,
    eps: f64,
) -> Result<u32> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::arg("target error must be positive"));
    }
    Error::check_dim(t.dim, k.dim())?;
    Error::check_dim(f.dim(), k.dim())?;
    for p in k.points() {
        for (z, r) in p.iter().zip(&t.radii) {
            if z.norm() > r * (1.0 + 1e-12) {
                return Err(Error::arg(format!(
                    "compact leaves the closed polydisc of radii {:?}",
                    t.radii
                )));
            }
        }
    }
    let order = t
        .entries
        .keys()
        .filter(|k| k.iter().all(|&v| v >= 0))
        .map(|k| k.iter().sum::<i32>() as u32)
        .max()
        .unwrap_or(0);
    let full = homogeneous_sum(t, order)?;
    let parts: Vec<Polynomial> = (0..=order).map(|m| full.homogeneous_part(m)).collect();
    let pts: Vec<&[C64]> = k.points().collect();
    // per point: f(x) − p_m(x) for every m
    let residuals = exec::try_map(&pts, |x| {
        let mut r = f.eval(x)?;
        Ok(parts
            .iter()
            .map(|p| {
                r -= p.eval_unchecked(x);
                r.norm()
            })
            .collect::<Vec<f64>>())
    })?;
    let mut best = f64::INFINITY;
    for m in 0..=order as usize {
        let err = residuals.iter().map(|r| r[m]).fold(0.0, f64::max);
        best = best.min(err);
        if err < eps {
            return Ok(m as u32);
        }
    }
    Err(Error::Convergence {
        message: format!("partial sums up to degree {order} do not reach {eps:e}"),
        best_error: best,
    })
}

/// max |c_ν| over indices with some ν_j < 0 and all |ν_j| ≤ d.
pub fn negative_vanishing_check<F: ComplexMap + ?Sized>(
    f: &F,
    d: u32,
    radii: &[f64],
    m: usize,
) -> Result<f64> {
    let samples = TorusSamples::sample(f, radii, m)?;
    let mut worst: f64 = 0.0;
    for nu in box_indices(radii.len(), d as i32) {
        if nu.iter().any(|&v| v < 0) {
            worst = worst.max(samples.coeff(&nu)?.norm());
        }
    }
    Ok(worst)
}

/// Deterministic sample of the unit sphere in C²: (cos a·e^{iφ}, sin a·e^{iψ}).
pub fn sphere_sample(steps: usize) -> Vec<[C64; 2]> {
    let mut out = Vec::with_capacity(steps * steps * steps);
    for i in 0..steps {
        let a = std::f64::consts::FRAC_PI_2 * (i as f64 + 0.5) / steps as f64;
        for j in 0..steps {
            for l in 0..steps {
                let phi = TAU * j as f64 / steps as f64;
                let psi = TAU * l as f64 / steps as f64;
                out.push([C64::from_polar(a.cos(), phi), C64::from_polar(a.sin(), psi)]);
            }
        }
    }
    out
}

/// For g = f∘R with R unitary, the homogeneous parts satisfy Q_k = P_k∘R.
/// Returns max over k ≤ degree and a sphere sample of |Q_k(w) − P_k(Rw)|.
pub fn rotation_uniqueness_check(
    f: &FunctionExpr,
    r: [[C64; 2]; 2],
    degree: u32,
    radii: &[f64],
    m: usize,
) -> Result<f64> {
    Error::check_dim(2, f.dim())?;
    Error::check_dim(2, radii.len())?;
    f.check_holomorphic()?;
    let mut gram = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in gram.iter_mut().enumerate() {
        for (j, g) in row.iter_mut().enumerate() {
            *g = (0..2).map(|k| r[k][i].conj() * r[k][j]).sum();
        }
    }
    let unitary_defect = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (gram[i][j] - if i == j { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    if unitary_defect > 1e-12 {
        return Err(Error::arg(format!(
            "matrix is not unitary (defect {unitary_defect:e})"
        )));
    }
    let g = f.compose_linear(&[r[0].to_vec(), r[1].to_vec()])?;
    let tp = taylor_table(f, degree, radii, m)?;
    let tq = taylor_table(&g, degree, radii, m)?;
    let sample = sphere_sample(8);
    let mut worst: f64 = 0.0;
    for k in 0..=degree {
        let p = homogeneous_part(&tp, k)?;
        let q = homogeneous_part(&tq, k)?;
        for w in &sample {
            let rw = [
                r[0][0] * w[0] + r[0][1] * w[1],
                r[1][0] * w[0] + r[1][1] * w[1],
            ];
            worst = worst.max((q.eval_unchecked(w) - p.eval_unchecked(&rw)).norm());
        }
    }
    Ok(worst)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    nu: Vec<i32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    dim: usize,
    radii: Vec<f64>,
    nodes: usize,
    entries: Vec<EntryJson>,
}

impl TryFrom<TableJson> for SeriesTable {
    type Error = Error;
    fn try_from(j: TableJson) -> Result<Self> {
        check_radii(&j.radii)?;
        Error::check_dim(j.dim, j.radii.len())?;
        if j.nodes < MIN_NODES {
            return Err(Error::arg("nodes per circle below minimum"));
        }
        let mut entries = BTreeMap::new();
        for e in j.entries {
            Error::check_dim(j.dim, e.nu.len())?;
            if !(e.re.is_finite() && e.im.is_finite()) {
                return Err(Error::arg("coefficients must be finite"));
            }
            entries.insert(e.nu, C64::new(e.re, e.im));
        }
        Ok(SeriesTable {
            dim: j.dim,
            radii: j.radii,
            nodes: j.nodes,
            entries,
        })
    }
}

impl From<SeriesTable> for TableJson {
    fn from(t: SeriesTable) -> Self {
        TableJson {
            dim: t.dim,
            radii: t.radii,
            nodes: t.nodes,
            entries: t
                .entries
                .into_iter()
                .map(|(nu, c)| EntryJson {
                    nu,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests;
