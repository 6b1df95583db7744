//! Numeric core: complex points, multi-indices, polynomials and rational
//! functions on C^n, and the Gaussian-rational coefficient families used by
//! the hull and extremal-function constructions.

mod family;
mod multi_index;
mod polynomial;
mod rational;
mod region;

pub use family::{coefficient_lattice, enumerate_rational_family, DenseFamily, FamilySpec};
pub use multi_index::{monomial, term_count, MultiIndex};
pub use polynomial::Polynomial;
pub use rational::{singularity_distance, RationalFunction, DEFAULT_TAU_POLE, DEFAULT_TAU_SING};
pub use region::BoxRegion;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex<f64>;

/// Anything that can be evaluated pointwise on C^n.
pub trait ComplexMap: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, z: &[C64]) -> Result<C64>;

    /// Operations that rely on holomorphy call this first. Expressions with a
    /// branch cut refuse unless holomorphy was asserted by the caller.
    fn check_holomorphic(&self) -> Result<()> {
        Ok(())
    }
}

impl<T: ComplexMap + ?Sized> ComplexMap for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, z: &[C64]) -> Result<C64> {
        (**self).eval(z)
    }
    fn check_holomorphic(&self) -> Result<()> {
        (**self).check_holomorphic()
    }
}

impl<T: ComplexMap + ?Sized + Send> ComplexMap for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, z: &[C64]) -> Result<C64> {
        (**self).eval(z)
    }
    fn check_holomorphic(&self) -> Result<()> {
        (**self).check_holomorphic()
    }
}

pub(crate) fn ensure_finite(c: C64, at: &[C64]) -> Result<C64> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(Error::Domain(format!(
            "non-finite value at {}",
            crate::error::fmt_point(at)
        )))
    }
}

/// Euclidean distance on C^n viewed as R^(2n).
pub fn dist(a: &[C64], b: &[C64]) -> f64 {
    dist_sq(a, b).sqrt()
}

pub fn dist_sq(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
