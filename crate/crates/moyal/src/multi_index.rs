//! Multi-indices n = (n₁, …, n_d) with the conventions used by the weighted
//! norms: |n| = Σ nⱼ, n^{βn} = Π nⱼ^{β nⱼ} with 0⁰ = 1.

use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total order |n| = n₁ + … + n_d.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// Componentwise n ≤ m.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// n − m, assuming m ≤ n componentwise.
    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// n^{βn} = Π nⱼ^{β nⱼ}, with the factor for nⱼ = 0 defined as 1.
    pub fn pow_beta<T: Scalar>(&self, beta: T) -> T {
        self.0.iter().fold(T::one(), |acc, &nj| {
            if nj == 0 {
                acc
            } else {
                let n = T::of_usize(nj as usize);
                acc * n.powf(beta * n)
            }
        })
    }

    /// Π nⱼ! as a scalar.
    pub fn factorial<T: Scalar>(&self) -> T {
        self.0.iter().fold(T::one(), |acc, &nj| {
            acc * (1..=nj).fold(T::one(), |p, k| p * T::of_usize(k as usize))
        })
    }

    /// Falling factorial Π nⱼ!/(nⱼ−kⱼ)!; zero when any kⱼ > nⱼ.
    pub fn falling<T: Scalar>(&self, k: &MultiIndex) -> T {
        let mut acc = T::one();
        for (&nj, &kj) in self.0.iter().zip(&k.0) {
            if kj > nj {
                return T::zero();
            }
            for i in (nj - kj + 1)..=nj {
                acc = acc * T::of_usize(i as usize);
            }
        }
        acc
    }

    /// All multi-indices of dimension d with total order exactly `order`.
    pub fn with_order(d: usize, order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; d];
        fn rec(cur: &mut Vec<u32>, j: usize, left: u32, out: &mut Vec<MultiIndex>) {
            if j + 1 == cur.len() {
                cur[j] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for v in 0..=left {
                cur[j] = v;
                rec(cur, j + 1, left - v, out);
            }
        }
        if d == 0 {
            if order == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(&mut cur, 0, order, &mut out);
        out
    }

    /// All multi-indices of dimension d with total order ≤ `max_order`,
    /// in increasing order.
    pub fn up_to_order(d: usize, max_order: u32) -> Vec<MultiIndex> {
        (0..=max_order).flat_map(|m| Self::with_order(d, m)).collect()
    }

    /// Key form "n1,n2,…" used by the JSON coefficient maps.
    pub fn to_key(&self) -> String {
        self.0
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn from_key(key: &str) -> Option<MultiIndex> {
        let parts: Result<Vec<u32>, _> = key.split(',').map(|s| s.trim().parse()).collect();
        parts.ok().map(MultiIndex)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_key())
    }
}
