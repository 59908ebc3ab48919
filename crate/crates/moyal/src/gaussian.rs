//! Gaussian-exponential symbols exp(−x·Mx + b·x + c) and their closed-form
//! parameter maps: Fourier transforms, the star product of two Gaussians
//! (completing the square in the double-integral form), linear substitutions
//! for the symplectic transforms, and polynomial-moment integrals.

use crate::error::{MoyalError, Result};
use crate::linalg::{self, CMat};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;
use crate::scalar::{im, re, CNum, Scalar};
use crate::theta::ThetaMatrix;

/// exp(−x·Mx + b·x + c) with M complex symmetric, Re(M) positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian<T: Scalar> {
    m: CMat<T>,
    b: Vec<CNum<T>>,
    c: CNum<T>,
}

impl<T: Scalar> Gaussian<T> {
    pub fn new(m: CMat<T>, b: Vec<CNum<T>>, c: CNum<T>) -> Result<Self> {
        let d = m.n;
        if b.len() != d {
            return Err(MoyalError::Construction("b has wrong dimension".into()));
        }
        let tol = T::exact_tol(1e-12) * m.max_abs().max(T::one());
        for i in 0..d {
            for j in 0..d {
                if (m[(i, j)] - m[(j, i)]).norm() > tol {
                    return Err(MoyalError::Construction("M must be symmetric".into()));
                }
            }
        }
        if !linalg::real_part_positive_definite(&m) {
            return Err(MoyalError::Construction(
                "Re(M) must be positive definite for integrability".into(),
            ));
        }
        Ok(Gaussian { m, b, c })
    }

    /// Isotropic e^{−a|x|²}, a > 0.
    pub fn isotropic(d: usize, a: T) -> Result<Self> {
        let mut m = CMat::zeros(d);
        for i in 0..d {
            m[(i, i)] = re(a);
        }
        Self::new(m, vec![re(T::zero()); d], re(T::zero()))
    }

    /// e^{−a|x−center|²}.
    pub fn offset_isotropic(d: usize, a: T, center: &[T]) -> Result<Self> {
        Self::isotropic(d, a)?.shift(center)
    }

    pub fn dim(&self) -> usize {
        self.m.n
    }

    pub fn quadratic(&self) -> &CMat<T> {
        &self.m
    }

    pub fn linear(&self) -> &[CNum<T>] {
        &self.b
    }

    pub fn constant(&self) -> CNum<T> {
        self.c
    }

    pub fn eval(&self, x: &[T]) -> CNum<T> {
        let xc: Vec<CNum<T>> = x.iter().map(|&v| re(v)).collect();
        self.eval_complex(&xc)
    }

    pub fn eval_complex(&self, x: &[CNum<T>]) -> CNum<T> {
        let quad = self.m.bilinear(x, x);
        let lin = self
            .b
            .iter()
            .zip(x)
            .map(|(&bi, &xi)| bi * xi)
            .fold(re(T::zero()), |a, b| a + b);
        (-quad + lin + self.c).exp()
    }

    /// log of the global maximum of |f| over ℝ^d.
    pub fn log_peak_abs(&self) -> T {
        let d = self.dim();
        let re_m = CMat {
            n: d,
            data: self.m.data.iter().map(|z| re(z.re)).collect(),
        };
        let re_b: Vec<CNum<T>> = self.b.iter().map(|z| re(z.re)).collect();
        match linalg::solve(&re_m, &re_b) {
            Ok(z) => {
                // max of −xAx + rx at x* = A⁻¹r/2 equals r·x*/2 · ... = ¼ r A⁻¹ r
                let quarter = T::of(0.25);
                let corr: CNum<T> = re_b
                    .iter()
                    .zip(&z)
                    .map(|(&a, &b)| a * b)
                    .fold(re(T::zero()), |a, b| a + b);
                self.c.re + quarter * corr.re
            }
            Err(_) => self.c.re,
        }
    }

    /// ∫ f dx = π^{d/2} e^{c + ¼b·M⁻¹b} / √det M, along the analytic branch.
    pub fn integral(&self) -> Result<CNum<T>> {
        let d = self.dim();
        let z = linalg::solve(&self.m, &self.b)?;
        let quarter = re(T::of(0.25));
        let corr = self
            .b
            .iter()
            .zip(&z)
            .map(|(&a, &b)| a * b)
            .fold(re(T::zero()), |a, b| a + b);
        let logdet = linalg::logdet_analytic(&self.m)?;
        let half = re(T::of(0.5));
        let log_pref = re(T::of_usize(d) * T::of(0.5) * T::PI().ln()) - half * logdet;
        Ok((self.c + quarter * corr + log_pref).exp())
    }

    fn fourier_map(&self, inverse: bool) -> Result<Self> {
        let d = self.dim();
        let minv = linalg::inverse(&self.m)?;
        let quarter = re(T::of(0.25));
        let m_new = minv.scale(quarter);
        let minv_b = minv.matvec(&self.b);
        let half_i = im::<T>() * re(T::of(0.5));
        let sign = if inverse { T::one() } else { -T::one() };
        let b_new: Vec<CNum<T>> = minv_b.iter().map(|&z| half_i * re(sign) * z).collect();
        let corr = self
            .b
            .iter()
            .zip(&minv_b)
            .map(|(&a, &b)| a * b)
            .fold(re(T::zero()), |a, b| a + b);
        let logdet = linalg::logdet_analytic(&self.m)?;
        let mut c_new = self.c + quarter * corr
            + re(T::of_usize(d) * T::of(0.5) * T::PI().ln())
            - re(T::of(0.5)) * logdet;
        if inverse {
            c_new = c_new - re(T::of_usize(d) * (T::PI() + T::PI()).ln());
        }
        Gaussian::new(m_new, b_new, c_new)
    }

    /// Forward transform ∫ f(x) e^{−ip·x} dx, exactly on the parameters.
    pub fn fourier_forward(&self) -> Result<Self> {
        self.fourier_map(false)
    }

    /// Inverse transform (2π)^{−d} ∫ f(p) e^{+ip·x} dp.
    pub fn fourier_inverse(&self) -> Result<Self> {
        self.fourier_map(true)
    }

    /// Compose with a real linear substitution: x ↦ f(A x).
    pub fn substitute_linear(&self, a: &[T]) -> Result<Self> {
        let d = self.dim();
        assert_eq!(a.len(), d * d);
        let ac = CMat::from_real(d, a);
        let at = ac.transpose();
        let m_new = at.matmul(&self.m).matmul(&ac);
        let b_new = at.matvec(&self.b);
        Gaussian::new(m_new, b_new, self.c)
    }

    /// f(x − s) for real s.
    pub fn shift(&self, s: &[T]) -> Result<Self> {
        let d = self.dim();
        assert_eq!(s.len(), d);
        let sc: Vec<CNum<T>> = s.iter().map(|&v| re(v)).collect();
        let ms = self.m.matvec(&sc);
        let two = re(T::of(2.0));
        let b_new: Vec<CNum<T>> = self.b.iter().zip(&ms).map(|(&bi, &mi)| bi + two * mi).collect();
        let s_m_s = self.m.bilinear(&sc, &sc);
        let b_s = self
            .b
            .iter()
            .zip(&sc)
            .map(|(&a, &b)| a * b)
            .fold(re(T::zero()), |a, b| a + b);
        let c_new = self.c - s_m_s - b_s;
        Gaussian::new(self.m.clone(), b_new, c_new)
    }

    /// f(q − x) as a Gaussian in x, for real q.
    pub fn reflect_shift(&self, q: &[T]) -> Result<Self> {
        let d = self.dim();
        assert_eq!(q.len(), d);
        let qc: Vec<CNum<T>> = q.iter().map(|&v| re(v)).collect();
        let mq = self.m.matvec(&qc);
        let two = re(T::of(2.0));
        let b_new: Vec<CNum<T>> = self.b.iter().zip(&mq).map(|(&bi, &mi)| two * mi - bi).collect();
        let q_m_q = self.m.bilinear(&qc, &qc);
        let b_q = self
            .b
            .iter()
            .zip(&qc)
            .map(|(&a, &b)| a * b)
            .fold(re(T::zero()), |a, b| a + b);
        let c_new = self.c + b_q - q_m_q;
        Gaussian::new(self.m.clone(), b_new, c_new)
    }

    /// f(x) e^{i k·x} for real k.
    pub fn modulate(&self, k: &[T]) -> Result<Self> {
        let b_new: Vec<CNum<T>> = self
            .b
            .iter()
            .zip(k)
            .map(|(&bi, &ki)| bi + im::<T>() * re(ki))
            .collect();
        Gaussian::new(self.m.clone(), b_new, self.c)
    }

    /// Dilation f(x/ν).
    pub fn dilate(&self, nu: T) -> Result<Self> {
        let inv = T::one() / nu;
        let m_new = self.m.scale(re(inv * inv));
        let b_new: Vec<CNum<T>> = self.b.iter().map(|&z| z * re(inv)).collect();
        Gaussian::new(m_new, b_new, self.c)
    }

    /// Pointwise product of two Gaussians (parameters add).
    pub fn product(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.dim(), other.dim());
        let m_new = self.m.add(&other.m);
        let b_new: Vec<CNum<T>> =
            self.b.iter().zip(&other.b).map(|(&a, &b)| a + b).collect();
        Gaussian::new(m_new, b_new, self.c + other.c)
    }

    /// Complex conjugate (as a function on real arguments).
    pub fn conj(&self) -> Self {
        Gaussian {
            m: self.m.conj(),
            b: self.b.iter().map(|z| z.conj()).collect(),
            c: self.c.conj(),
        }
    }

    /// Scale the whole symbol by e^{w}.
    pub fn scale_log(&self, w: CNum<T>) -> Self {
        Gaussian { m: self.m.clone(), b: self.b.clone(), c: self.c + w }
    }

    /// The star product of two Gaussians for invertible θ, by completing the
    /// square in the double-integral form. For θ = 0 it degenerates to the
    /// pointwise product.
    pub fn star(&self, other: &Self, theta: &ThetaMatrix<T>) -> Result<Self> {
        let d = self.dim();
        assert_eq!(other.dim(), d);
        assert_eq!(theta.dim(), d);
        if theta.is_zero() {
            return self.product(other);
        }
        let theta_inv = theta.inverse_entries()?;

        // Q = [[M₁, iθ⁻¹], [−iθ⁻¹, M₂]] over w = (y, z)
        let n2 = 2 * d;
        let mut q = CMat::zeros(n2);
        for i in 0..d {
            for j in 0..d {
                q[(i, j)] = self.m[(i, j)];
                q[(d + i, d + j)] = other.m[(i, j)];
                let t = theta_inv[i * d + j];
                q[(i, d + j)] = im::<T>() * re(t);
                q[(d + i, j)] = -(im::<T>() * re(t));
            }
        }

        // β = (b₁; b₂), S = [[−2M₁]; [−2M₂]]
        let beta: Vec<CNum<T>> = self.b.iter().chain(other.b.iter()).copied().collect();
        let minus_two = re(-T::of(2.0));
        let s_col = |col: usize| -> Vec<CNum<T>> {
            let mut v = vec![re(T::zero()); n2];
            for i in 0..d {
                v[i] = minus_two * self.m[(i, col)];
                v[d + i] = minus_two * other.m[(i, col)];
            }
            v
        };

        let z_beta = linalg::solve(&q, &beta)?;
        let quarter = re(T::of(0.25));
        let half = re(T::of(0.5));

        // M⋆ = M₁ + M₂ − ¼ Sᵀ Q⁻¹ S
        let mut m_star = self.m.add(&other.m);
        let mut w_cols: Vec<Vec<CNum<T>>> = Vec::with_capacity(d);
        for col in 0..d {
            w_cols.push(linalg::solve(&q, &s_col(col))?);
        }
        for r in 0..d {
            let sr = s_col(r);
            for cidx in 0..d {
                let dot = sr
                    .iter()
                    .zip(&w_cols[cidx])
                    .map(|(&a, &b)| a * b)
                    .fold(re(T::zero()), |a, b| a + b);
                m_star[(r, cidx)] = m_star[(r, cidx)] - quarter * dot;
            }
        }

        // b⋆ = b₁ + b₂ + ½ Sᵀ Q⁻¹ β
        let mut b_star: Vec<CNum<T>> =
            self.b.iter().zip(&other.b).map(|(&a, &b)| a + b).collect();
        for r in 0..d {
            let sr = s_col(r);
            let dot = sr
                .iter()
                .zip(&z_beta)
                .map(|(&a, &b)| a * b)
                .fold(re(T::zero()), |a, b| a + b);
            b_star[r] = b_star[r] + half * dot;
        }

        // c⋆ = c₁ + c₂ + ¼ βᵀQ⁻¹β − ln det θ − ½ ln det Q
        let beta_corr = beta
            .iter()
            .zip(&z_beta)
            .map(|(&a, &b)| a * b)
            .fold(re(T::zero()), |a, b| a + b);
        let logdet_q = linalg::logdet_analytic(&q)?;
        let c_star =
            self.c + other.c + quarter * beta_corr - re(theta.det().ln()) - half * logdet_q;

        Gaussian::new(m_star, b_star, c_star)
    }

    /// ∫ p(x) f(x) dx for a polynomial p, via b-derivatives of the Gaussian
    /// integral: each coordinate moment is ∂/∂b_i applied to
    /// π^{d/2}(det M)^{−1/2} e^{¼ b·M⁻¹ b + c}.
    pub fn poly_moment_integral(&self, p: &Polynomial<T>) -> Result<CNum<T>> {
        let plan = GaussMomentPlan::new(self.m.clone())?;
        Ok(plan.integral(&self.b, self.c, p))
    }
}

/// Precomputed M-dependent pieces of ∫ p(x) e^{−xMx + bx + c} dx, reused
/// across many (b, c) pairs sharing one quadratic form.
pub struct GaussMomentPlan<T: Scalar> {
    d: usize,
    minv: CMat<T>,
    /// (d/2)·ln π − ½ log det M along the analytic branch.
    log_pref: CNum<T>,
    /// ℓ_i(b) = ½ (M⁻¹ b)_i as polynomials in the b variables.
    linears: Vec<Polynomial<T>>,
}

impl<T: Scalar> GaussMomentPlan<T> {
    pub fn new(m: CMat<T>) -> Result<Self> {
        let d = m.n;
        let minv = linalg::inverse(&m)?;
        let logdet = linalg::logdet_analytic(&m)?;
        let log_pref =
            re(T::of_usize(d) * T::of(0.5) * T::PI().ln()) - re(T::of(0.5)) * logdet;
        let half = re(T::of(0.5));
        let linears = (0..d)
            .map(|i| {
                let mut l = Polynomial::zero(d);
                for j in 0..d {
                    let mut n = MultiIndex::zero(d);
                    n.0[j] = 1;
                    l.set(n, half * minv[(i, j)]);
                }
                l
            })
            .collect();
        Ok(GaussMomentPlan { d, minv, log_pref, linears })
    }

    /// ∫ p(x) e^{−xMx + bx + c} dx for the plan's M.
    pub fn integral(&self, b: &[CNum<T>], c: CNum<T>, p: &Polynomial<T>) -> CNum<T> {
        assert_eq!(p.dim(), self.d);
        let quarter = re(T::of(0.25));
        let minv_b = self.minv.matvec(b);
        let corr = b
            .iter()
            .zip(&minv_b)
            .map(|(&a, &z)| a * z)
            .fold(re(T::zero()), |a, z| a + z);
        let base = (c + quarter * corr + self.log_pref).exp();
        let mut total = re(T::zero());
        for (alpha, &coef) in p.coeffs() {
            let mut acc = Polynomial::constant(self.d, re(T::one()));
            for j in 0..self.d {
                for _ in 0..alpha.get(j) {
                    let mut k = MultiIndex::zero(self.d);
                    k.0[j] = 1;
                    acc = acc.derivative(&k).add(&acc.mul(&self.linears[j]));
                }
            }
            total = total + coef * acc.eval_complex(b);
        }
        total * base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn c(re_: f64, im_: f64) -> C64 {
        C64::new(re_, im_)
    }

    #[test]
    fn eval_isotropic() {
        let g = Gaussian::<f64>::isotropic(2, 1.0).unwrap();
        let v = g.eval(&[1.0, 2.0]);
        assert!((v.re - (-5.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn integral_matches_closed_form() {
        // ∫ e^{−x²} over ℝ² = π
        let g = Gaussian::<f64>::isotropic(2, 1.0).unwrap();
        let v = g.integral().unwrap();
        assert!((v.re - std::f64::consts::PI).abs() < 1e-13);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn fourier_of_standard_gaussian() {
        // d=1: e^{−x²/2} ↦ √(2π) e^{−p²/2}
        let mut m = CMat::zeros(1);
        m[(0, 0)] = c(0.5, 0.0);
        let g = Gaussian::new(m, vec![c(0.0, 0.0)], c(0.0, 0.0)).unwrap();
        let gh = g.fourier_forward().unwrap();
        let at = |p: f64| gh.eval(&[p]);
        let want = |p: f64| (2.0 * std::f64::consts::PI).sqrt() * (-p * p / 2.0).exp();
        for p in [0.0, 0.7, -1.9] {
            assert!((at(p).re - want(p)).abs() < 1e-13);
            assert!(at(p).im.abs() < 1e-13);
        }
        // round trip
        let back = gh.fourier_inverse().unwrap();
        for x in [0.3, -1.1] {
            assert!((back.eval(&[x]) - g.eval(&[x])).norm() < 1e-14);
        }
    }

    #[test]
    fn star_of_unit_gaussians_is_projector_like() {
        // in d=2 with θ = J: e^{−|x|²} ⋆ e^{−|x|²} = ½ e^{−|x|²}
        let g = Gaussian::<f64>::isotropic(2, 1.0).unwrap();
        let th = ThetaMatrix::canonical(2, 1.0).unwrap();
        let s = g.star(&g, &th).unwrap();
        for x in [[0.0, 0.0], [0.5, -0.3], [1.2, 0.8]] {
            let want = g.eval(&x) * 0.5;
            assert!((s.eval(&x) - want).norm() < 1e-13, "at {x:?}");
        }
    }

    #[test]
    fn star_general_width_formula() {
        // e^{−a|x|²} ⋆ e^{−a|x|²} = (1+a²θ₀²)⁻¹ exp(−2a|x|²/(1+a²θ₀²))
        let a = 0.6;
        let t0 = 1.3;
        let g = Gaussian::<f64>::isotropic(2, a).unwrap();
        let th = ThetaMatrix::canonical(2, t0).unwrap();
        let s = g.star(&g, &th).unwrap();
        let denom = 1.0 + a * a * t0 * t0;
        for x in [[0.0, 0.0], [0.9, 0.4], [-1.5, 2.0]] {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let want = (1.0 / denom) * (-2.0 * a * r2 / denom).exp();
            assert!((s.eval(&x).re - want).abs() < 1e-13, "at {x:?}");
            assert!(s.eval(&x).im.abs() < 1e-13);
        }
    }

    #[test]
    fn theta_zero_star_is_pointwise() {
        let g1 = Gaussian::<f64>::offset_isotropic(2, 0.8, &[0.3, -0.2]).unwrap();
        let g2 = Gaussian::<f64>::isotropic(2, 1.1).unwrap();
        let th = ThetaMatrix::zero(2).unwrap();
        let s = g1.star(&g2, &th).unwrap();
        let x = [0.4, 0.9];
        assert!((s.eval(&x) - g1.eval(&x) * g2.eval(&x)).norm() < 1e-15);
    }

    #[test]
    fn shift_and_reflect_shift() {
        let g = Gaussian::<f64>::isotropic(2, 0.7).unwrap();
        let s = [0.8, -0.5];
        let shifted = g.shift(&s).unwrap();
        let x = [1.0, 2.0];
        assert!((shifted.eval(&x) - g.eval(&[x[0] - s[0], x[1] - s[1]])).norm() < 1e-15);
        let refl = g.reflect_shift(&s).unwrap();
        assert!((refl.eval(&x) - g.eval(&[s[0] - x[0], s[1] - x[1]])).norm() < 1e-15);
    }

    #[test]
    fn poly_moments() {
        // ∫ x² e^{−x²} dx = √π/2 in d=1
        let g = Gaussian::<f64>::isotropic(1, 1.0).unwrap();
        let mut p = Polynomial::zero(1);
        p.set(MultiIndex(vec![2]), c(1.0, 0.0));
        let v = g.poly_moment_integral(&p).unwrap();
        assert!((v.re - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
        // odd moment vanishes
        let mut p1 = Polynomial::zero(1);
        p1.set(MultiIndex(vec![1]), c(1.0, 0.0));
        assert!(g.poly_moment_integral(&p1).unwrap().norm() < 1e-15);
        // with a shift: ∫ x e^{−(x−1)²} = √π
        let gs = g.shift(&[1.0]).unwrap();
        let v1 = gs.poly_moment_integral(&p1).unwrap();
        assert!((v1.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn non_positive_definite_rejected() {
        let mut m = CMat::zeros(2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(-0.2, 0.0);
        assert!(Gaussian::new(m, vec![c(0.0, 0.0); 2], c(0.0, 0.0)).is_err());
    }
}
