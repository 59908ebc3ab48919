//! The real antisymmetric noncommutativity matrix θ, its inverse, and the
//! −4θ⁻¹ bridge matrix.

use crate::error::{MoyalError, Result};
use crate::linalg::{det, inverse, CMat};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Real antisymmetric d×d matrix θ^{ij}, with its determinant and, when it
/// exists, its inverse. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaMatrix<T: Scalar> {
    d: usize,
    entries: Vec<T>,
    inverse: Option<Vec<T>>,
    det: T,
}

impl<T: Scalar> ThetaMatrix<T> {
    /// Canonical block-diagonal form θ₀·J with J the standard symplectic
    /// matrix: 2×2 blocks [[0, 1], [−1, 0]] along the diagonal.
    pub fn canonical(d: usize, theta0: T) -> Result<Self> {
        if d < 2 || d % 2 != 0 {
            return Err(MoyalError::Construction(format!(
                "phase-space dimension must be even and ≥ 2, got {d}"
            )));
        }
        let mut entries = vec![T::zero(); d * d];
        for b in 0..d / 2 {
            entries[(2 * b) * d + (2 * b + 1)] = theta0;
            entries[(2 * b + 1) * d + 2 * b] = -theta0;
        }
        Self::from_entries_impl(d, entries)
    }

    /// θ = 0: the commutative limit. Singular by construction.
    pub fn zero(d: usize) -> Result<Self> {
        if d < 2 || d % 2 != 0 {
            return Err(MoyalError::Construction(format!(
                "phase-space dimension must be even and ≥ 2, got {d}"
            )));
        }
        Ok(ThetaMatrix { d, entries: vec![T::zero(); d * d], inverse: None, det: T::zero() })
    }

    /// Arbitrary antisymmetric entries, validated at construction.
    pub fn from_entries(entries: &[Vec<T>]) -> Result<Self> {
        let d = entries.len();
        if d < 2 || d % 2 != 0 {
            return Err(MoyalError::Construction(format!(
                "phase-space dimension must be even and ≥ 2, got {d}"
            )));
        }
        let mut flat = vec![T::zero(); d * d];
        for (i, row) in entries.iter().enumerate() {
            if row.len() != d {
                return Err(MoyalError::Construction("entries must be square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                flat[i * d + j] = v;
            }
        }
        Self::from_entries_impl(d, flat)
    }

    fn from_entries_impl(d: usize, entries: Vec<T>) -> Result<Self> {
        let scale = entries.iter().map(|v| v.abs()).fold(T::one(), T::max);
        let tol = T::exact_tol(1e-12) * scale;
        for i in 0..d {
            for j in 0..d {
                if (entries[i * d + j] + entries[j * d + i]).abs() > tol {
                    return Err(MoyalError::Construction(format!(
                        "entries are not antisymmetric at ({i},{j})"
                    )));
                }
            }
        }
        let m = CMat::from_real(d, &entries);
        let dcx = det(&m);
        let dt = dcx.re;
        let singular_tol = T::exact_tol(1e-12) * scale.powi(d as i32).max(T::epsilon());
        if dt.abs() <= singular_tol {
            return Ok(ThetaMatrix { d, entries, inverse: None, det: T::zero() });
        }
        // the determinant of an invertible real antisymmetric matrix is a
        // square (of the Pfaffian), hence positive
        if dt <= T::zero() {
            return Err(MoyalError::Construction(
                "invertible antisymmetric matrix must have positive determinant".into(),
            ));
        }
        let inv = inverse(&m).map_err(|_| MoyalError::SingularTheta)?;
        // verify θ·θ⁻¹ = 1 entrywise
        let prod = m.matmul(&inv);
        let check_tol = T::exact_tol(1e-12) * T::of(16.0);
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { T::one() } else { T::zero() };
                if (prod[(i, j)].re - want).abs() > check_tol || prod[(i, j)].im.abs() > check_tol {
                    return Err(MoyalError::Construction(
                        "inverse verification failed".into(),
                    ));
                }
            }
        }
        let inv_real: Vec<T> = inv.data.iter().map(|z| z.re).collect();
        Ok(ThetaMatrix { d, entries, inverse: Some(inv_real), det: dt })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.entries[i * self.d + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn det(&self) -> T {
        self.det
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| *v == T::zero())
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn inverse_entries(&self) -> Result<&[T]> {
        self.inverse.as_deref().ok_or(MoyalError::SingularTheta)
    }

    /// θ·p (matrix-vector product, (θp)^i = θ^{ij} p_j).
    pub fn times(&self, p: &[T]) -> Vec<T> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.entries[i * self.d + j] * p[j]).sum())
            .collect()
    }

    /// θᵀ·p = −θ·p.
    pub fn transpose_times(&self, p: &[T]) -> Vec<T> {
        self.times(p).into_iter().map(|v| -v).collect()
    }

    /// θ⁻¹·p.
    pub fn inverse_times(&self, p: &[T]) -> Result<Vec<T>> {
        let inv = self.inverse_entries()?;
        Ok((0..self.d)
            .map(|i| (0..self.d).map(|j| inv[i * self.d + j] * p[j]).sum())
            .collect())
    }

    /// Bilinear form p·θq = Σ p_i θ^{ij} q_j.
    pub fn form(&self, p: &[T], q: &[T]) -> T {
        let tq = self.times(q);
        p.iter().zip(&tq).map(|(&a, &b)| a * b).sum()
    }

    /// Entrywise scaling s·θ.
    pub fn scaled(&self, s: T) -> Result<Self> {
        let entries: Vec<Vec<T>> = (0..self.d)
            .map(|i| (0..self.d).map(|j| self.entries[i * self.d + j] * s).collect())
            .collect();
        Self::from_entries(&entries)
    }

    /// The bridge matrix −4θ⁻¹, itself a valid antisymmetric matrix.
    pub fn bridge(&self) -> Result<Self> {
        let inv = self.inverse_entries()?;
        let four = T::of(4.0);
        let entries: Vec<Vec<T>> = (0..self.d)
            .map(|i| (0..self.d).map(|j| -four * inv[i * self.d + j]).collect())
            .collect();
        Self::from_entries(&entries)
    }

    /// |θ| = Σ_{ij} |θ^{ij}|.
    pub fn abs_sum(&self) -> T {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    /// Largest |θ^{ij}|.
    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|v| v.abs()).fold(T::zero(), T::max)
    }

    /// Index pairs (i, j) with θ^{ij} ≠ 0.
    pub fn active_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.d {
            for j in 0..self.d {
                if self.entries[i * self.d + j] != T::zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }
}
