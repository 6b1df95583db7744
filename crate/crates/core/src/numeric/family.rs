//! Countable families of polynomials with Gaussian-rational coefficients,
//! truncated by degree and coefficient height.
//!
//! Coefficient lattice for height H: the distinct nonzero values (a+bi)/c with
//! integers |a|,|b| ≤ H and 1 ≤ c ≤ H, each taken once in lowest terms
//! (gcd(a,b,c) = 1). Lattice order is (c, |a|+|b|, a, b).
//!
//! Family order: polynomials are grouped by exact degree D = 0, 1, …, d.
//! Within a degree, a polynomial is the tuple of its coefficients over all
//! monomials of degree ≤ D in multi-index order; each coefficient ranges over
//! 0 followed by the lattice, and tuples are listed lexicographically with the
//! constant term most significant. Tuples without a degree-D term belong to a
//! lower degree and are skipped. Polynomials that differ only by a scalar
//! factor are all kept.

use serde::{Deserialize, Serialize};

use super::{monomial, term_count, MultiIndex, Polynomial, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub dim: usize,
    pub max_degree: u32,
    pub height: u32,
    /// Upper bound on the number of members.
    pub cap: Option<usize>,
    /// When the family exceeds `cap`: keep the first `cap` members in family
    /// order (`true`) or fail with a resource-budget error (`false`).
    pub truncate: bool,
}

impl FamilySpec {
    pub fn new(dim: usize, max_degree: u32, height: u32) -> Self {
        FamilySpec {
            dim,
            max_degree,
            height,
            cap: None,
            truncate: false,
        }
    }

    pub fn with_cap(mut self, cap: usize, truncate: bool) -> Self {
        self.cap = Some(cap);
        self.truncate = truncate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::arg("family dimension must be >= 1"));
        }
        if self.height == 0 {
            return Err(Error::arg("coefficient height must be >= 1 (empty family)"));
        }
        Ok(())
    }

    /// Size of the untruncated family, saturating at u128::MAX.
    pub fn full_size(&self) -> u128 {
        let base = coefficient_lattice(self.height).len() as u128 + 1;
        let width = term_count(self.dim, self.max_degree as usize);
        match u32::try_from(width).ok().and_then(|w| base.checked_pow(w)) {
            Some(v) => v - 1,
            None => u128::MAX,
        }
    }
}

/// Distinct nonzero Gaussian rationals of height ≤ `height`, in lattice order.
pub fn coefficient_lattice(height: u32) -> Vec<C64> {
    let h = height as i64;
    let mut keyed = Vec::new();
    for c in 1..=h {
        for a in -h..=h {
            for b in -h..=h {
                if (a, b) == (0, 0) || gcd(gcd(a.abs(), b.abs()), c) != 1 {
                    continue;
                }
                keyed.push((
                    (c, a.abs() + b.abs(), a, b),
                    C64::new(a as f64 / c as f64, b as f64 / c as f64),
                ));
            }
        }
    }
    keyed.sort_by_key(|(k, _)| *k);
    keyed.into_iter().map(|(_, v)| v).collect()
}

fn increment(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A polynomial family stored as a dense coefficient matrix over a shared
/// monomial basis (multi-index order). Row `i` is member `i`.
#[derive(Debug, Clone)]
pub struct DenseFamily {
    dim: usize,
    monomials: Vec<MultiIndex>,
    coeffs: Vec<C64>,
    degrees: Vec<u32>,
    /// Members dropped by truncation.
    truncated: u128,
}

impl DenseFamily {
    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        spec.validate()?;
        let full = spec.full_size();
        let limit = match spec.cap {
            Some(cap) if full > cap as u128 => {
                if !spec.truncate {
                    return Err(Error::ResourceBudget { size: full, cap });
                }
                cap
            }
            _ => usize::try_from(full).map_err(|_| Error::ResourceBudget {
                size: full,
                cap: usize::MAX,
            })?,
        };

        let lattice = coefficient_lattice(spec.height);
        let radix = lattice.len() + 1;
        let monomials = MultiIndex::all_up_to(spec.dim, spec.max_degree);
        let width = monomials.len();
        let mut coeffs = Vec::with_capacity(limit.saturating_mul(width).min(1 << 28));
        let mut degrees = Vec::with_capacity(limit.min(1 << 24));

        'outer: for deg in 0..=spec.max_degree {
            let t_lo = if deg == 0 {
                0
            } else {
                term_count(spec.dim, deg as usize - 1) as usize
            };
            let t_hi = term_count(spec.dim, deg as usize) as usize;
            // mixed-radix counter, position 0 most significant
            let mut digits = vec![0usize; t_hi];
            loop {
                if digits[t_lo..].iter().any(|&d| d != 0) {
                    if degrees.len() == limit {
                        break 'outer;
                    }
                    for k in 0..width {
                        let c = match digits.get(k) {
                            Some(&d) if d > 0 => lattice[d - 1],
                            _ => C64::new(0.0, 0.0),
                        };
                        coeffs.push(c);
                    }
                    degrees.push(deg);
                }
                if !increment(&mut digits, radix) {
                    break;
                }
            }
        }

        let kept = degrees.len() as u128;
        Ok(DenseFamily {
            dim: spec.dim,
            monomials,
            coeffs,
            degrees,
            truncated: full - kept,
        })
    }

    /// Explicit member list, in the given order.
    pub fn from_polynomials(dim: usize, polys: &[Polynomial]) -> Result<Self> {
        let mut basis: Vec<MultiIndex> = Vec::new();
        for p in polys {
            Error::check_dim(dim, p.dim())?;
            basis.extend(p.terms().map(|(a, _)| a.clone()));
        }
        basis.sort();
        basis.dedup();
        let width = basis.len();
        let mut coeffs = Vec::with_capacity(polys.len() * width);
        for p in polys {
            for a in &basis {
                coeffs.push(p.coeff(a));
            }
        }
        Ok(DenseFamily {
            dim,
            monomials: basis,
            coeffs,
            degrees: polys.iter().map(Polynomial::degree).collect(),
            truncated: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn truncated(&self) -> u128 {
        self.truncated
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn row(&self, i: usize) -> &[C64] {
        let w = self.monomials.len();
        &self.coeffs[i * w..(i + 1) * w]
    }

    pub fn member(&self, i: usize) -> Polynomial {
        Polynomial::from_terms(
            self.dim,
            self.monomials
                .iter()
                .cloned()
                .zip(self.row(i).iter().copied())
                .filter(|(_, c)| *c != C64::new(0.0, 0.0)),
        )
        .expect("consistent family")
    }

    pub fn to_polynomials(&self) -> Vec<Polynomial> {
        (0..self.len()).map(|i| self.member(i)).collect()
    }

    /// Values of every basis monomial at `z`.
    pub fn monomial_values(&self, z: &[C64]) -> Vec<C64> {
        self.monomials.iter().map(|a| monomial(z, a)).collect()
    }

    /// Member `i` evaluated from precomputed monomial values, summed in
    /// basis order over its nonzero coefficients (same order as
    /// [`Polynomial::eval`]).
    #[inline]
    pub fn eval_row(&self, i: usize, values: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (c, v) in self.row(i).iter().zip(values) {
            if c.re != 0.0 || c.im != 0.0 {
                acc += c * v;
            }
        }
        acc
    }
}

/// Materialize the family as polynomials in family order.
pub fn enumerate_rational_family(spec: &FamilySpec) -> Result<Vec<Polynomial>> {
    Ok(DenseFamily::from_spec(spec)?.to_polynomials())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c64;
    use std::collections::HashSet;

    // Independent enumeration: every (a,b,c) triple per coefficient slot,
    // deduplicated by polynomial value.
    fn brute_family_size(n_monomials: usize, h: i64) -> usize {
        let mut vals: Vec<(i64, i64, i64)> = Vec::new();
        for c in 1..=h {
            for a in -h..=h {
                for b in -h..=h {
                    vals.push((a, b, c));
                }
            }
        }
        // distinct values as exact fractions keyed by (a*L/c, b*L/c)
        let l: i64 = (1..=h).product();
        let distinct: HashSet<(i64, i64)> = vals
            .iter()
            .map(|&(a, b, c)| (a * l / c, b * l / c))
            .collect();
        let per_slot = distinct.len();
        let mut total = 1usize;
        for _ in 0..n_monomials {
            total *= per_slot;
        }
        total - 1
    }

    #[test]
    fn lattice_is_distinct_and_nonzero() {
        for h in 1..=3 {
            let lat = coefficient_lattice(h);
            let keys: HashSet<(u64, u64)> = lat
                .iter()
                .map(|c| (c.re.to_bits(), c.im.to_bits()))
                .collect();
            assert_eq!(keys.len(), lat.len());
            assert!(lat.iter().all(|c| c.norm() > 0.0));
        }
        assert_eq!(coefficient_lattice(1).len(), 8);
        assert_eq!(coefficient_lattice(2).len(), 40);
    }

    #[test]
    fn family_size_golden_n1_d1_h1() {
        let spec = FamilySpec::new(1, 1, 1);
        let fam = enumerate_rational_family(&spec).unwrap();
        let oracle = brute_family_size(2, 1);
        assert_eq!(oracle, 80);
        assert_eq!(fam.len(), 80);
        assert_eq!(spec.full_size(), 80);
    }

    #[test]
    fn family_sizes_match_brute_force() {
        for (n, d, h) in [(1, 0, 1), (1, 2, 1), (2, 1, 1), (1, 1, 2)] {
            let spec = FamilySpec::new(n, d, h);
            let fam = DenseFamily::from_spec(&spec).unwrap();
            let m = term_count(n, d as usize) as usize;
            assert_eq!(
                fam.len(),
                brute_family_size(m, h as i64),
                "n={n} d={d} h={h}"
            );
        }
    }

    #[test]
    fn membership_examples() {
        let fam = enumerate_rational_family(&FamilySpec::new(1, 1, 1)).unwrap();
        let z = Polynomial::variable(1, 0);
        let iz = z.scale(c64(0.0, 1.0));
        let one_plus_z = z.add(&Polynomial::constant(1, c64(1.0, 0.0))).unwrap();
        for p in [&z, &iz, &one_plus_z] {
            assert!(fam.contains(p), "missing {p}");
        }
        assert!(fam.iter().all(|p| !p.is_zero()));
    }

    #[test]
    fn degree_zero_family_is_constants() {
        let fam = enumerate_rational_family(&FamilySpec::new(1, 0, 1)).unwrap();
        assert_eq!(fam.len(), 8);
        let lat = coefficient_lattice(1);
        for (p, c) in fam.iter().zip(&lat) {
            assert_eq!(p.degree(), 0);
            assert_eq!(p.coeff(&MultiIndex::zero(1)), *c);
        }
    }

    #[test]
    fn order_is_by_degree_and_deterministic() {
        let spec = FamilySpec::new(2, 2, 1);
        let a = DenseFamily::from_spec(&spec.clone().with_cap(5000, true)).unwrap();
        let b = crate::exec::with_threads(Some(3), || {
            DenseFamily::from_spec(&spec.clone().with_cap(5000, true)).unwrap()
        });
        assert_eq!(a.len(), 5000);
        assert!((1..a.len()).all(|i| a.degree(i - 1) <= a.degree(i)));
        for i in 0..a.len() {
            assert_eq!(a.row(i), b.row(i));
        }
    }

    #[test]
    fn cap_without_truncation_is_budget_error() {
        let spec = FamilySpec::new(1, 3, 2).with_cap(1000, false);
        assert!(matches!(
            DenseFamily::from_spec(&spec),
            Err(Error::ResourceBudget { cap: 1000, .. })
        ));
        let t = DenseFamily::from_spec(&spec.with_cap(1000, true)).unwrap();
        assert_eq!(t.len(), 1000);
        assert_eq!(t.truncated(), 41u128.pow(4) - 1 - 1000);
    }

    #[test]
    fn zero_height_is_rejected() {
        assert!(DenseFamily::from_spec(&FamilySpec::new(1, 0, 0)).is_err());
    }

    #[test]
    fn dense_eval_matches_polynomial_eval() {
        let fam = DenseFamily::from_spec(&FamilySpec::new(2, 2, 1).with_cap(3000, true)).unwrap();
        let z = [c64(0.3, -0.7), c64(-1.1, 0.2)];
        let mv = fam.monomial_values(&z);
        for i in (0..fam.len()).step_by(37) {
            assert_eq!(fam.eval_row(i, &mv), fam.member(i).eval(&z).unwrap());
        }
    }
}
