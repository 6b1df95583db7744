use serde::{Deserialize, Serialize};

use super::{ComplexMap, Polynomial, C64};
use crate::compact::CompactNet;
use crate::error::{Error, Result};
use crate::exec;

/// Relative pole tolerance: evaluation fails when
/// |q(z)| < DEFAULT_TAU_POLE · (1 + |p(z)|).
pub const DEFAULT_TAU_POLE: f64 = 1e-12;

/// A rational function counts as analytic over a net when
/// min |q| over the net is at least this.
pub const DEFAULT_TAU_SING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RationalJson", into = "RationalJson")]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    tau_pole: f64,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        Error::check_dim(num.dim(), den.dim())?;
        if den.is_zero() {
            return Err(Error::arg("denominator is identically zero"));
        }
        Ok(RationalFunction {
            num,
            den,
            tau_pole: DEFAULT_TAU_POLE,
        })
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let dim = p.dim();
        RationalFunction::new(p, Polynomial::constant(dim, C64::new(1.0, 0.0)))
            .expect("constant denominator")
    }

    pub fn with_tau_pole(mut self, tau: f64) -> Self {
        self.tau_pole = tau;
        self
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        let p = self.num.eval(z)?;
        let q = self.den.eval_unchecked(z);
        if q.norm() < self.tau_pole * (1.0 + p.norm()) {
            return Err(Error::PoleProximity {
                point: z.to_vec(),
                modulus: q.norm(),
            });
        }
        Ok(p / q)
    }
}

impl ComplexMap for RationalFunction {
    fn dim(&self) -> usize {
        self.num.dim()
    }
    fn eval(&self, z: &[C64]) -> Result<C64> {
        RationalFunction::eval(self, z)
    }
}

/// min over net points of |q(x)|; the computable stand-in for the distance
/// from K to the singular set of r.
pub fn singularity_distance(r: &RationalFunction, k: &CompactNet) -> Result<f64> {
    Error::check_dim(r.dim(), k.dim())?;
    let pts: Vec<&[C64]> = k.points().collect();
    Ok(exec::map(&pts, |x| r.den.eval_unchecked(x).norm())
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalJson {
    num: Polynomial,
    den: Polynomial,
}

impl TryFrom<RationalJson> for RationalFunction {
    type Error = Error;
    fn try_from(j: RationalJson) -> Result<Self> {
        RationalFunction::new(j.num, j.den)
    }
}

impl From<RationalFunction> for RationalJson {
    fn from(r: RationalFunction) -> Self {
        RationalJson {
            num: r.num,
            den: r.den,
        }
    }
}
