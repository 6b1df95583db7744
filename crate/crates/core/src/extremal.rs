//! Lower estimates of the Siciak extremal function
//! Φ_K(z) = sup { |p(z)|^{1/deg p} : deg p ≥ 1, ‖p‖_K ≤ 1 }
//! over finite polynomial families, and of V_K = log Φ_K.
//!
//! Every value here is a lower estimate of Φ_K, up to the net artifact: ‖p‖_K
//! is measured on the net, which underestimates the true sup norm.

use serde::Serialize;

use crate::compact::{max_abs_on, CompactNet};
use crate::error::{Error, Result};
use crate::exec;
use crate::numeric::{DenseFamily, Polynomial, C64};

/// |p(z)|^{1/deg p} if ‖p‖_K ≤ 1 on the net, else 0.
pub fn g_p(p: &Polynomial, k: &CompactNet, z: &[C64]) -> Result<f64> {
    let d = p.degree();
    if d == 0 {
        return Err(Error::arg("g_p needs a polynomial of degree >= 1"));
    }
    Error::check_dim(k.dim(), z.len())?;
    if max_abs_on(k, p)? > 1.0 {
        return Ok(0.0);
    }
    Ok(p.eval(z)?.norm().powf(1.0 / d as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalEstimate {
    /// Lower estimate of Φ_K(z); may be +∞ in normalized mode when some
    /// member vanishes on the net but not at z.
    pub value: f64,
    /// Member attaining the value (normalized if requested); `None` when no
    /// member is feasible.
    pub witness: Option<Polynomial>,
    /// Position of the witness in the family.
    pub witness_index: Option<usize>,
    /// Members of degree ≥ 1 that were scanned.
    pub family_size: usize,
    pub normalized: bool,
}

/// sup of g_p over the family members of degree ≥ 1. With `normalize`, each
/// p is first divided by ‖p‖_K. Ties go to the earliest member.
pub fn siciak(
    k: &CompactNet,
    z: &[C64],
    family: &DenseFamily,
    normalize: bool,
) -> Result<ExtremalEstimate> {
    Error::check_dim(k.dim(), z.len())?;
    Error::check_dim(k.dim(), family.dim())?;
    let active: Vec<usize> = (0..family.len())
        .filter(|&i| family.degree(i) > 0)
        .collect();
    if active.is_empty() {
        return Err(Error::arg("family has no member of degree >= 1"));
    }
    let net: Vec<Vec<C64>> = k.points().map(|x| family.monomial_values(x)).collect();
    let at_z = family.monomial_values(z);
    // (value, norm) per active member; None when infeasible in raw mode
    let scored = exec::map(&active, |&i| {
        let norm = net
            .iter()
            .map(|v| family.eval_row(i, v).norm())
            .fold(0.0, f64::max);
        let pz = family.eval_row(i, &at_z).norm();
        let inv_deg = 1.0 / family.degree(i) as f64;
        if normalize {
            let ratio = if norm > 0.0 {
                pz / norm
            } else if pz > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            Some((ratio.powf(inv_deg), norm))
        } else if norm <= 1.0 {
            Some((pz.powf(inv_deg), norm))
        } else {
            None
        }
    });
    let mut best: Option<(usize, f64, f64)> = None;
    for (pos, s) in scored.into_iter().enumerate() {
        if let Some((v, norm)) = s {
            if best.is_none_or(|(_, b, _)| v > b) {
                best = Some((active[pos], v, norm));
            }
        }
    }
    let (value, witness, witness_index) = match best {
        None => (0.0, None, None),
        Some((i, v, norm)) => {
            let p = family.member(i);
            let w = if normalize && norm > 0.0 {
                p.scale(C64::new(1.0 / norm, 0.0))
            } else {
                p
            };
            (v, Some(w), Some(i))
        }
    };
    Ok(ExtremalEstimate {
        value,
        witness,
        witness_index,
        family_size: active.len(),
        normalized: normalize,
    })
}

/// log of a Siciak estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenValue {
    Finite(f64),
    Infinite,
}

impl GreenValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            GreenValue::Finite(v) => Some(v),
            GreenValue::Infinite => None,
        }
    }
}

/// V_K(z) estimate. Reported raw: it may be negative for a poor family.
pub fn green(
    k: &CompactNet,
    z: &[C64],
    family: &DenseFamily,
    normalize: bool,
) -> Result<(GreenValue, ExtremalEstimate)> {
    let est = siciak(k, z, family, normalize)?;
    let v = if est.value == 0.0 {
        return Err(Error::Undefined(
            "every member was rejected or vanishes at the point; log of 0".into(),
        ));
    } else if est.value.is_infinite() {
        GreenValue::Infinite
    } else {
        GreenValue::Finite(est.value.ln())
    };
    Ok((v, est))
}

/// Chebyshev polynomials T_1, …, T_d of the first kind.
pub fn chebyshev_family(max_degree: u32) -> Vec<Polynomial> {
    let z = Polynomial::variable(1, 0);
    let two_z = z.scale(C64::new(2.0, 0.0));
    let mut prev = Polynomial::constant(1, C64::new(1.0, 0.0));
    let mut cur = z;
    let mut out = Vec::new();
    for _ in 0..max_degree {
        out.push(cur.clone());
        let next = two_z
            .mul(&cur)
            .and_then(|t| t.sub(&prev))
            .expect("same dimension");
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// z^1, …, z^d in one variable.
pub fn monomial_family(max_degree: u32) -> Vec<Polynomial> {
    let z = Polynomial::variable(1, 0);
    (1..=max_degree).map(|k| z.pow(k)).collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::compact::Shape;
    use crate::numeric::c64;

    fn disk(h: f64) -> CompactNet {
        CompactNet::from_shape(
            &Shape::Disk {
                center: c64(0.0, 0.0),
                radius: 1.0,
            },
            h,
        )
        .unwrap()
    }

    fn segment(h: f64) -> CompactNet {
        CompactNet::from_shape(
            &Shape::Segment {
                a: c64(-1.0, 0.0),
                b: c64(1.0, 0.0),
            },
            h,
        )
        .unwrap()
    }

    fn fam(polys: &[Polynomial]) -> DenseFamily {
        DenseFamily::from_polynomials(1, polys).unwrap()
    }

    #[test]
    fn g_p_examples() {
        let k = disk(0.05);
        let z = Polynomial::variable(1, 0);
        let two = [c64(2.0, 0.0)];
        assert!((g_p(&z, &k, &two).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(g_p(&z.scale(c64(2.0, 0.0)), &k, &two).unwrap(), 0.0);
        assert_eq!(
            g_p(&z.scale(c64(2.0, 0.0)), &k, &[c64(0.1, 0.0)]).unwrap(),
            0.0
        );
        // 0.5·z³: |0.5·8|^{1/3}
        assert!(
            (g_p(&z.pow(3).scale(c64(0.5, 0.0)), &k, &two).unwrap() - 4f64.cbrt()).abs() < 1e-12
        );
        assert!(matches!(
            g_p(&Polynomial::constant(1, c64(0.5, 0.0)), &k, &two),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn monomials_on_disk() {
        let k = disk(0.05);
        let f = fam(&monomial_family(8));
        let est = siciak(&k, &[c64(2.0, 0.0)], &f, true).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
        let w = est.witness.unwrap();
        // the witness reproduces the value and is feasible
        assert!(
            (w.eval(&[c64(2.0, 0.0)])
                .unwrap()
                .norm()
                .powf(1.0 / w.degree() as f64)
                - est.value)
                .abs()
                < 1e-12
        );
        assert!(max_abs_on(&k, &w).unwrap() <= 1.0 + 1e-12);
        let e = std::f64::consts::E;
        let (v, _) = green(&k, &[c64(e, 0.0)], &f, true).unwrap();
        assert!((v.finite().unwrap() - 1.0).abs() < 1e-9);
        let (inside, _) = green(&k, &[c64(0.3, 0.2)], &f, true).unwrap();
        assert!(inside.finite().unwrap() <= 1e-9);
    }

    #[test]
    fn chebyshev_on_segment() {
        let cheb = chebyshev_family(32);
        // recurrence oracle at a few points: T_k(cos t) = cos(k t)
        for (t, k) in cheb.iter().zip(1u32..) {
            let x = 0.3f64;
            let v = t.eval(&[c64(x, 0.0)]).unwrap();
            assert!((v.re - (k as f64 * x.acos()).cos()).abs() < 1e-6);
            assert_eq!(t.degree(), k);
        }
        let k = segment(0.001);
        let est = siciak(&k, &[c64(2.0, 0.0)], &fam(&cheb), true).unwrap();
        let upper = 2.0 + 3f64.sqrt() + 0.05;
        assert!(est.value >= 3.5 && est.value <= upper, "{}", est.value);
        // T_k(2) = cosh(k arccosh 2) oracle for the witness degree
        let d = est.witness.as_ref().unwrap().degree() as f64;
        let oracle = (d * 2f64.acosh()).cosh().powf(1.0 / d);
        assert!((est.value - oracle).abs() < 1e-3);
        let (g, _) = green(&k, &[c64(2.0, 0.0)], &fam(&cheb), true).unwrap();
        assert!((g.finite().unwrap() - est.value.ln()).abs() < 1e-15);
    }

    #[test]
    fn points_of_k_stay_at_most_one() {
        let k = segment(0.05);
        let f = fam(&chebyshev_family(12));
        for p in k.points().step_by(5) {
            assert!(siciak(&k, p, &f, true).unwrap().value <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn raw_mode_rejects_large_norms() {
        let k = disk(0.05);
        let z = Polynomial::variable(1, 0);
        let f = fam(&[z.scale(c64(3.0, 0.0)), z.pow(2).scale(c64(2.0, 0.0))]);
        let est = siciak(&k, &[c64(2.0, 0.0)], &f, false).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.witness.is_none());
        assert!(matches!(
            green(&k, &[c64(2.0, 0.0)], &f, false),
            Err(Error::Undefined(_))
        ));
        let f = fam(&[z.scale(c64(0.5, 0.0)), z.clone()]);
        let est = siciak(&k, &[c64(2.0, 0.0)], &f, false).unwrap();
        assert_eq!(est.witness_index, Some(1));
    }

    #[test]
    fn vanishing_on_net_is_infinite() {
        let k = CompactNet::from_points(vec![vec![c64(0.0, 0.0)]], 0.1).unwrap();
        let f = fam(&[Polynomial::variable(1, 0)]);
        let (v, est) = green(&k, &[c64(1.0, 0.0)], &f, true).unwrap();
        assert_eq!(v, GreenValue::Infinite);
        assert!(est.value.is_infinite());
    }

    #[test]
    fn family_needs_nonconstant_member() {
        let k = disk(0.1);
        let f = fam(&[Polynomial::constant(1, c64(1.0, 0.0))]);
        assert!(matches!(
            siciak(&k, &[c64(2.0, 0.0)], &f, true),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn power_consistency() {
        let k = segment(0.01);
        let z0 = [c64(1.5, 0.7)];
        for p in chebyshev_family(5) {
            let a = siciak(&k, &z0, &fam(std::slice::from_ref(&p)), true)
                .unwrap()
                .value;
            for m in 2..4 {
                let b = siciak(&k, &z0, &fam(&[p.pow(m)]), true).unwrap().value;
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn thread_independent_argmax() {
        let k = disk(0.05);
        let f = DenseFamily::from_spec(&crate::numeric::FamilySpec::new(1, 2, 1)).unwrap();
        let run = || siciak(&k, &[c64(1.3, -0.4)], &f, true).unwrap();
        let a = exec::with_threads(Some(1), run);
        let b = exec::with_threads(Some(4), run);
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn enlarging_family_never_decreases(extra in 1u32..6, x in -3.0..3.0f64, y in -3.0..3.0f64) {
            let k = segment(0.05);
            let all = chebyshev_family(6 + extra);
            let small = siciak(&k, &[c64(x, y)], &fam(&all[..6]), true).unwrap().value;
            let big = siciak(&k, &[c64(x, y)], &fam(&all), true).unwrap().value;
            prop_assert!(big >= small);
        }

        #[test]
        fn larger_set_gives_smaller_estimate(x in -3.0..3.0f64, y in 0.2..3.0f64) {
            let small = segment(0.05);
            let big = crate::compact::union(&small, &disk(0.1)).unwrap();
            let f = fam(&chebyshev_family(6));
            let z = [c64(x, y)];
            let on_small = siciak(&small, &z, &f, true).unwrap().value;
            let on_big = siciak(&big, &z, &f, true).unwrap().value;
            prop_assert!(on_big <= on_small + 1e-9);
        }

        #[test]
        fn estimates_below_closed_form_on_disk(r in 1.0..4.0f64, t in 0.0..std::f64::consts::TAU) {
            let k = disk(0.05);
            let f = DenseFamily::from_spec(&crate::numeric::FamilySpec::new(1, 2, 1)).unwrap();
            let z = C64::from_polar(r, t);
            let est = siciak(&k, &[z], &f, true).unwrap().value;
            // Φ of the unit disk is max(1, |z|); net tolerance h
            prop_assert!(est <= r.max(1.0) * (1.0 + 0.05) + 1e-9);
        }
    }
}
