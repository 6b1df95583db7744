use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::C64;

/// Exponent vector α ∈ N^n.
///
/// Ordered by total degree |α| first, then lexicographically on the
/// exponents. This is the fixed term order used everywhere a polynomial is
/// summed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        assert!(!exponents.is_empty(), "multi-index must have length >= 1");
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex::new(vec![0; n])
    }

    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex::new(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// |α|
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// α! = α_1! ⋯ α_n!
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).map(f64::from).product::<f64>())
            .product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All multi-indices of length `n` with |α| ≤ `max_degree`, in term order.
    pub fn all_up_to(n: usize, max_degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for d in 0..=max_degree {
            let mut cur = vec![0u32; n];
            push_compositions(&mut out, &mut cur, 0, d);
        }
        out.sort();
        out
    }
}

fn push_compositions(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in 0..=left {
        cur[pos] = a;
        push_compositions(out, cur, pos + 1, left - a);
    }
    cur[pos] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

/// z^α, evaluated factor by factor in coordinate order.
pub fn monomial(z: &[C64], alpha: &MultiIndex) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for (zj, &e) in z.iter().zip(alpha.exponents()) {
        if e > 0 {
            acc *= zj.powu(e);
        }
    }
    acc
}

/// Number of monomials of degree ≤ k in n variables:
/// Σ_{ℓ=0}^{k} C(n+ℓ−1, n−1) = C(n+k, n).
pub fn term_count(n: usize, k: usize) -> u128 {
    assert!(n >= 1, "dimension must be >= 1");
    binomial((n + k) as u128, n as u128)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
