//! Multivariate polynomials with complex coefficients, keyed by multi-index.

use crate::error::{MoyalError, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::{CNum, Scalar};
use std::collections::BTreeMap;

/// Σ_n c_n x^n with finitely many nonzero complex coefficients.
/// The map is ordered, so iteration (and every reduction over terms) is
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T: Scalar> {
    d: usize,
    coeffs: BTreeMap<MultiIndex, CNum<T>>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(d: usize) -> Self {
        Polynomial { d, coeffs: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: CNum<T>) -> Self {
        let mut p = Self::zero(d);
        p.set(MultiIndex::zero(d), c);
        p
    }

    /// The coordinate function x^{axis} (1-based in the usual notation,
    /// 0-based here).
    pub fn coordinate(d: usize, axis: usize) -> Self {
        assert!(axis < d);
        let mut n = MultiIndex::zero(d);
        n.0[axis] = 1;
        let mut p = Self::zero(d);
        p.set(n, CNum::new(T::one(), T::zero()));
        p
    }

    pub fn from_coeffs(d: usize, coeffs: impl IntoIterator<Item = (MultiIndex, CNum<T>)>) -> Result<Self> {
        let mut p = Self::zero(d);
        for (n, c) in coeffs {
            if n.dim() != d {
                return Err(MoyalError::Construction(format!(
                    "coefficient index {n} has wrong dimension (expected {d})"
                )));
            }
            if c.norm() != T::zero() {
                let slot = p.coeffs.entry(n).or_insert_with(|| CNum::new(T::zero(), T::zero()));
                *slot = *slot + c;
            }
        }
        p.prune();
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, CNum<T>> {
        &self.coeffs
    }

    pub fn set(&mut self, n: MultiIndex, c: CNum<T>) {
        assert_eq!(n.dim(), self.d);
        if c.norm() == T::zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|n| n.order()).max()
    }

    /// Drop coefficients that are exactly zero (after cancellations).
    pub fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() != T::zero());
    }

    /// Drop coefficients below `tol` in magnitude.
    pub fn prune_below(&mut self, tol: T) {
        self.coeffs.retain(|_, c| c.norm() > tol);
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (n, &c) in &other.coeffs {
            let slot = out.coeffs.entry(n.clone()).or_insert_with(|| CNum::new(T::zero(), T::zero()));
            *slot = *slot + c;
        }
        out.prune();
        out
    }

    pub fn scale(&self, s: CNum<T>) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = *c * s;
        }
        out.prune();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let mut out = Self::zero(self.d);
        for (n, &a) in &self.coeffs {
            for (m, &b) in &other.coeffs {
                let k = n.add(m);
                let slot = out.coeffs.entry(k).or_insert_with(|| CNum::new(T::zero(), T::zero()));
                *slot = *slot + a * b;
            }
        }
        out.prune();
        out
    }

    /// ∂^k applied exactly: c_n x^n → c_n · n!/(n−k)! · x^{n−k}.
    pub fn derivative(&self, k: &MultiIndex) -> Self {
        assert_eq!(k.dim(), self.d);
        let mut out = Self::zero(self.d);
        for (n, &c) in &self.coeffs {
            if !k.leq(n) {
                continue;
            }
            let factor: T = n.falling(k);
            let slot = out
                .coeffs
                .entry(n.sub(k))
                .or_insert_with(|| CNum::new(T::zero(), T::zero()));
            *slot = *slot + c * factor;
        }
        out.prune();
        out
    }

    /// Evaluate at a real point.
    pub fn eval(&self, x: &[T]) -> CNum<T> {
        assert_eq!(x.len(), self.d);
        let mut acc = CNum::new(T::zero(), T::zero());
        for (n, &c) in &self.coeffs {
            let mut mon = T::one();
            for (j, &nj) in n.0.iter().enumerate() {
                mon = mon * x[j].powi(nj as i32);
            }
            acc = acc + c * mon;
        }
        acc
    }

    /// Evaluate at a complex point.
    pub fn eval_complex(&self, x: &[CNum<T>]) -> CNum<T> {
        assert_eq!(x.len(), self.d);
        let mut acc = CNum::new(T::zero(), T::zero());
        for (n, &c) in &self.coeffs {
            let mut mon = CNum::new(T::one(), T::zero());
            for (j, &nj) in n.0.iter().enumerate() {
                for _ in 0..nj {
                    mon = mon * x[j];
                }
            }
            acc = acc + c * mon;
        }
        acc
    }

    /// Complex conjugate as a function on real arguments: conjugates the
    /// coefficients.
    pub fn conj(&self) -> Self {
        Polynomial {
            d: self.d,
            coeffs: self.coeffs.iter().map(|(n, c)| (n.clone(), c.conj())).collect(),
        }
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn coeff_sup(&self) -> T {
        self.coeffs.values().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// Substitute numeric values for the trailing variables, leaving a
    /// polynomial in the first `keep` variables.
    pub fn substitute_tail(&self, keep: usize, values: &[CNum<T>]) -> Polynomial<T> {
        assert_eq!(keep + values.len(), self.d);
        let mut out = Polynomial::zero(keep);
        for (n, &c) in &self.coeffs {
            let mut factor = c;
            for (t, &v) in values.iter().enumerate() {
                for _ in 0..n.get(keep + t) {
                    factor = factor * v;
                }
            }
            if factor.norm() == T::zero() {
                continue;
            }
            let head = MultiIndex(n.0[..keep].to_vec());
            let slot = out
                .coeffs
                .entry(head)
                .or_insert_with(|| CNum::new(T::zero(), T::zero()));
            *slot = *slot + factor;
        }
        out.prune();
        out
    }

    /// Truncated multivariate exponential series: Σ_{k≤terms} u^k/k! for a
    /// polynomial argument u, dropping monomials above `max_degree`.
    pub fn exp_truncated(u: &Self, terms: u32, max_degree: u32) -> Self {
        let mut acc = Self::constant(u.d, CNum::new(T::one(), T::zero()));
        let mut power = Self::constant(u.d, CNum::new(T::one(), T::zero()));
        let mut fact = T::one();
        for k in 1..=terms {
            power = power.mul(u);
            power.coeffs.retain(|n, _| n.order() <= max_degree);
            fact = fact * T::of_usize(k as usize);
            acc = acc.add(&power.scale(CNum::new(T::one() / fact, T::zero())));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eval_and_derivative() {
        // p = 2x₁²x₂ + i x₂
        let p = Polynomial::from_coeffs(
            2,
            [
                (MultiIndex(vec![2, 1]), c(2.0, 0.0)),
                (MultiIndex(vec![0, 1]), c(0.0, 1.0)),
            ],
        )
        .unwrap();
        assert_eq!(p.eval(&[1.0, 3.0]), c(6.0, 3.0));
        // ∂₁ p = 4 x₁ x₂
        let d1 = p.derivative(&MultiIndex(vec![1, 0]));
        assert_eq!(d1.eval(&[2.0, 5.0]), c(40.0, 0.0));
        // ∂₁²∂₂ p = 4
        let d = p.derivative(&MultiIndex(vec![2, 1]));
        assert_eq!(d.eval(&[7.0, -1.0]), c(4.0, 0.0));
    }

    #[test]
    fn product_degree() {
        let x1 = Polynomial::<f64>::coordinate(2, 0);
        let x2 = Polynomial::<f64>::coordinate(2, 1);
        let p = x1.mul(&x2);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval(&[3.0, 4.0]), c(12.0, 0.0));
    }

    #[test]
    fn exp_truncation_matches_scalar_exp() {
        // u = −0.3 x² in one variable; compare against exp(−0.3 t²)
        let mut u = Polynomial::<f64>::zero(1);
        u.set(MultiIndex(vec![2]), c(-0.3, 0.0));
        let p = Polynomial::exp_truncated(&u, 30, 60);
        let t: f64 = 1.7;
        let want = (-0.3 * t * t).exp();
        let got = p.eval(&[t]);
        assert!((got.re - want).abs() < 1e-12 && got.im == 0.0);
    }
}
