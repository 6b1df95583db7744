use super::C64;
use crate::error::{Error, Result};

/// Axis-aligned box in C^n ≅ R^(2n): `lo[j].re ≤ Re z_j ≤ hi[j].re` and the
/// same for imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub lo: Vec<C64>,
    pub hi: Vec<C64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<C64>, hi: Vec<C64>) -> Result<Self> {
        Error::check_dim(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::arg("box must have dimension >= 1"));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.re <= b.re && a.im <= b.im) {
                return Err(Error::arg("box lower corner exceeds upper corner"));
            }
        }
        Ok(BoxRegion { lo, hi })
    }

    /// Box with half-width `r` in every real direction around `center`.
    pub fn around(center: &[C64], r: f64) -> Self {
        let d = C64::new(r, r);
        BoxRegion {
            lo: center.iter().map(|c| c - d).collect(),
            hi: center.iter().map(|c| c + d).collect(),
        }
    }

    /// Smallest box containing all the points.
    pub fn bounding<'a, I>(dim: usize, points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [C64]>,
    {
        let mut lo = vec![C64::new(f64::INFINITY, f64::INFINITY); dim];
        let mut hi = vec![C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY); dim];
        let mut any = false;
        for p in points {
            any = true;
            for j in 0..dim {
                lo[j].re = lo[j].re.min(p[j].re);
                lo[j].im = lo[j].im.min(p[j].im);
                hi[j].re = hi[j].re.max(p[j].re);
                hi[j].im = hi[j].im.max(p[j].im);
            }
        }
        any.then_some(BoxRegion { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn expand(&self, r: f64) -> Self {
        let d = C64::new(r, r);
        BoxRegion {
            lo: self.lo.iter().map(|c| c - d).collect(),
            hi: self.hi.iter().map(|c| c + d).collect(),
        }
    }

    /// Lower and upper bound of real coordinate `k` (k = 2j for Re z_j,
    /// 2j+1 for Im z_j).
    pub fn real_bounds(&self, k: usize) -> (f64, f64) {
        let j = k / 2;
        if k.is_multiple_of(2) {
            (self.lo[j].re, self.hi[j].re)
        } else {
            (self.lo[j].im, self.hi[j].im)
        }
    }

    /// Largest coordinate modulus max_j |z_j| attained on the box.
    pub fn max_coord_modulus(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| {
                let x = a.re.abs().max(b.re.abs());
                let y = a.im.abs().max(b.im.abs());
                x.hypot(y)
            })
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        z.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(p, (a, b))| a.re <= p.re && p.re <= b.re && a.im <= p.im && p.im <= b.im)
    }
}
