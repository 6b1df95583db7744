use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{monomial, ComplexMap, MultiIndex, C64};
use crate::error::{Error, Result};

/// Polynomial on C^n with terms kept in [`MultiIndex`] order and no stored
/// zero coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialJson", into = "PolynomialJson")]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Polynomial::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    /// The coordinate function z_j (0-based).
    pub fn variable(dim: usize, j: usize) -> Self {
        assert!(j < dim);
        let mut p = Polynomial::zero(dim);
        p.add_term(MultiIndex::unit(dim, j), C64::new(1.0, 0.0));
        p
    }

    pub fn monomial(alpha: MultiIndex, c: C64) -> Self {
        let mut p = Polynomial::zero(alpha.len());
        p.add_term(alpha, c);
        p
    }

    /// Build from (α, a_α) pairs; repeated indices are summed.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, C64)>,
    {
        if dim == 0 {
            return Err(Error::arg("polynomial dimension must be >= 1"));
        }
        let mut p = Polynomial::zero(dim);
        for (alpha, c) in terms {
            Error::check_dim(dim, alpha.len())?;
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::arg("polynomial coefficients must be finite"));
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: C64) {
        let zero = C64::new(0.0, 0.0);
        let v = self.terms.get(&alpha).copied().unwrap_or(zero) + c;
        if v == zero {
            self.terms.remove(&alpha);
        } else {
            self.terms.insert(alpha, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// max |α| over stored terms; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C64 {
        self.terms.get(alpha).copied().unwrap_or_default()
    }

    /// Σ a_α z^α, summed in term order.
    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        Error::check_dim(self.dim, z.len())?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            acc += c * monomial(z, alpha);
        }
        acc
    }

    /// The degree-m homogeneous part P_m.
    pub fn homogeneous_part(&self, m: u32) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.degree() == m)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Polynomial {
        let mut p = Polynomial::zero(self.dim);
        for (a, c) in &self.terms {
            p.add_term(a.clone(), c * s);
        }
        p
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        Error::check_dim(self.dim, other.dim)?;
        let mut p = self.clone();
        for (a, c) in &other.terms {
            p.add_term(a.clone(), *c);
        }
        Ok(p)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        Error::check_dim(self.dim, other.dim)?;
        let mut p = Polynomial::zero(self.dim);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                p.add_term(a.add(b), c * d);
            }
        }
        Ok(p)
    }

    pub fn pow(&self, m: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.dim, C64::new(1.0, 0.0));
        for _ in 0..m {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }
}

impl ComplexMap for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, z: &[C64]) -> Result<C64> {
        Polynomial::eval(self, z)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PolynomialJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = Error;
    fn try_from(j: PolynomialJson) -> Result<Self> {
        for t in &j.terms {
            if t.alpha.len() != j.dim {
                return Err(Error::DimensionMismatch {
                    expected: j.dim,
                    found: t.alpha.len(),
                });
            }
        }
        Polynomial::from_terms(
            j.dim,
            j.terms
                .into_iter()
                .map(|t| (MultiIndex::new(t.alpha), C64::new(t.re, t.im))),
        )
    }
}

impl From<Polynomial> for PolynomialJson {
    fn from(p: Polynomial) -> Self {
        PolynomialJson {
            dim: p.dim,
            terms: p
                .terms
                .into_iter()
                .map(|(a, c)| TermJson {
                    alpha: a.exponents().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (j, &e) in a.exponents().iter().enumerate() {
                match (e, self.dim) {
                    (0, _) => {}
                    (1, 1) => write!(f, "*z")?,
                    (_, 1) => write!(f, "*z^{e}")?,
                    (1, _) => write!(f, "*z{}", j + 1)?,
                    _ => write!(f, "*z{}^{e}", j + 1)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c64;
    use proptest::prelude::*;

    fn naive_eval(p: &Polynomial, z: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (a, c) in p.terms() {
            let mut m = C64::new(1.0, 0.0);
            for (zj, &e) in z.iter().zip(a.exponents()) {
                for _ in 0..e {
                    m *= zj;
                }
            }
            acc += c * m;
        }
        acc
    }

    #[test]
    fn eval_examples() {
        let p = Polynomial::monomial(MultiIndex::new(vec![2]), c64(1.0, 0.0));
        assert_eq!(p.eval(&[c64(1.0, 1.0)]).unwrap(), c64(0.0, 2.0));
        assert_eq!(
            Polynomial::zero(3).eval(&[c64(1.0, 2.0); 3]).unwrap(),
            c64(0.0, 0.0)
        );
        let q = Polynomial::monomial(MultiIndex::new(vec![1, 1]), c64(1.0, 0.0));
        assert_eq!(
            q.eval(&[c64(2.0, 0.0), c64(3.0, 0.0)]).unwrap(),
            c64(6.0, 0.0)
        );
    }

    #[test]
    fn eval_dimension_mismatch() {
        let p = Polynomial::variable(2, 0);
        assert!(matches!(
            p.eval(&[c64(1.0, 0.0)]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn zeros_are_not_stored() {
        let p = Polynomial::variable(1, 0);
        let q = p.sub(&p).unwrap();
        assert!(q.is_zero());
        assert_eq!(q.degree(), 0);
    }

    #[test]
    fn json_shape() {
        let p = Polynomial::from_terms(2, [(MultiIndex::new(vec![1, 0]), c64(1.0, -2.0))]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"dim":2,"terms":[{"alpha":[1,0],"re":1.0,"im":-2.0}]}"#
        );
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Polynomial>(
            r#"{"dim":2,"terms":[{"alpha":[1],"re":1,"im":0}]}"#
        )
        .is_err());
    }

    fn arb_poly(dim: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(
            (
                prop::collection::vec(0u32..4, dim),
                -2.0..2.0f64,
                -2.0..2.0f64,
            ),
            0..8,
        )
        .prop_map(move |ts| {
            Polynomial::from_terms(
                dim,
                ts.into_iter()
                    .map(|(a, re, im)| (MultiIndex::new(a), c64(re, im))),
            )
            .unwrap()
        })
    }

    fn arb_point(dim: usize) -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec(
            (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(a, b)| c64(a, b)),
            dim,
        )
    }

    proptest! {
        #[test]
        fn eval_is_linear(p in arb_poly(2), q in arb_poly(2), z in arb_point(2)) {
            let lhs = p.add(&q).unwrap().eval(&z).unwrap();
            let rhs = p.eval(&z).unwrap() + q.eval(&z).unwrap();
            let scale = 1.0 + p.eval(&z).unwrap().norm() + q.eval(&z).unwrap().norm();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }

        #[test]
        fn eval_matches_naive(p in arb_poly(3), z in arb_point(3)) {
            let a = p.eval(&z).unwrap();
            let b = naive_eval(&p, &z);
            let scale: f64 = 1.0 + p.terms().map(|(_, c)| c.norm() * 1.5f64.powi(12)).sum::<f64>();
            prop_assert!((a - b).norm() <= 1e-10 * scale.max(b.norm()));
        }
    }
}
