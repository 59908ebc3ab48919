//! Uniform periodic phase-space grid on [−L, L)^d and its FFT dual.

use crate::error::{MoyalError, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Uniform periodic grid on [−L, L)^d with N points per axis (a power of
/// two). Nodes along each axis are x_m = −L + m·Δ with Δ = 2L/N; the dual
/// grid has spacing π/L and half-extent πN/(2L).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid<T: Scalar> {
    d: usize,
    n: usize,
    l: T,
}

impl<T: Scalar> PhaseGrid<T> {
    pub fn new(d: usize, l: T, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(MoyalError::Construction("dimension must be ≥ 1".into()));
        }
        if !(l > T::zero()) {
            return Err(MoyalError::Construction("half-extent L must be positive".into()));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(MoyalError::Construction(format!(
                "points per axis must be a power of two ≥ 4, got {n}"
            )));
        }
        Ok(PhaseGrid { d, n, l })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> T {
        self.l
    }

    /// Δ = 2L/N. Exactly satisfies Δ·N = 2L.
    pub fn spacing(&self) -> T {
        (self.l + self.l) / T::of_usize(self.n)
    }

    /// Dual-grid spacing π/L.
    pub fn dual_spacing(&self) -> T {
        T::PI() / self.l
    }

    /// Nyquist frequency πN/(2L), the dual grid's half-extent.
    pub fn nyquist(&self) -> T {
        T::PI() * T::of_usize(self.n) / (self.l + self.l)
    }

    /// The dual grid as a `PhaseGrid` in its own right. Involutive.
    pub fn dual(&self) -> PhaseGrid<T> {
        PhaseGrid { d: self.d, n: self.n, l: self.nyquist() }
    }

    /// Total number of nodes N^d.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinate along one axis.
    pub fn axis_node(&self, m: usize) -> T {
        -self.l + self.spacing() * T::of_usize(m)
    }

    /// All node coordinates along one axis, ascending.
    pub fn axis_nodes(&self) -> Vec<T> {
        (0..self.n).map(|m| self.axis_node(m)).collect()
    }

    /// Flat row-major index → per-axis indices.
    pub fn unravel(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.d];
        let mut rest = flat;
        for j in (0..self.d).rev() {
            idx[j] = rest % self.n;
            rest /= self.n;
        }
        idx
    }

    /// Per-axis indices → flat row-major index.
    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0usize, |acc, &i| acc * self.n + i)
    }

    /// Coordinates of the node with the given flat index.
    pub fn node(&self, flat: usize) -> Vec<T> {
        self.unravel(flat).into_iter().map(|m| self.axis_node(m)).collect()
    }

    /// Quadrature weight Δ^d of the trapezoid rule on the periodic grid.
    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.d as i32)
    }

    /// True if the node touches the boundary shell of the box on any axis.
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.unravel(flat).iter().any(|&m| m == 0 || m == self.n - 1)
    }

    /// Flat index of the node nearest the origin (all axis indices N/2,
    /// which is exactly x = 0).
    pub fn origin_index(&self) -> usize {
        let idx = vec![self.n / 2; self.d];
        self.ravel(&idx)
    }
}
