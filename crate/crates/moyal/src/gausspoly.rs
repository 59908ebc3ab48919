//! Exact star products of polynomial×Gaussian symbols.
//!
//! A symbol P(x)·e^{−xM x + b·x + c} is P(∂_s) applied to the pure Gaussian
//! with linear parameter s, evaluated at s = b. The star product of two pure
//! Gaussians with symbolic linear parameters (s, t) is exp E(x; s, t) with
//!
//!   E = −x·M⋆x + (A u)·x + ¼ u·Q⁻¹u + const,   u = (s, t),
//!
//! so P(∂_s)Q(∂_t) exp E = R(x, u)·exp E with R built by the recursion
//! D_i(R) = ∂_{u_i}R + R·∂_{u_i}E over a polynomial ring in (x, u).
//! Substituting the numeric u gives the exact product as another
//! polynomial×Gaussian. Everything is finite and closed-form; this module
//! is the reference the grid paths are checked against.

use crate::error::{MoyalError, Result};
use crate::gaussian::Gaussian;
use crate::grid::PhaseGrid;
use crate::linalg::{self, CMat};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;
use crate::scalar::{im, re, CNum, Scalar};
use crate::symbol::GridSymbol;
use crate::theta::ThetaMatrix;

/// P(x) · exp(−x·Mx + b·x + c).
#[derive(Debug, Clone)]
pub struct PolyGauss<T: Scalar> {
    pub poly: Polynomial<T>,
    pub gauss: Gaussian<T>,
}

impl<T: Scalar> PolyGauss<T> {
    pub fn new(poly: Polynomial<T>, gauss: Gaussian<T>) -> Self {
        assert_eq!(poly.dim(), gauss.dim());
        PolyGauss { poly, gauss }
    }

    pub fn pure(gauss: Gaussian<T>) -> Self {
        let one = Polynomial::constant(gauss.dim(), re(T::one()));
        PolyGauss { poly: one, gauss }
    }

    pub fn dim(&self) -> usize {
        self.gauss.dim()
    }

    pub fn eval(&self, x: &[T]) -> CNum<T> {
        self.poly.eval(x) * self.gauss.eval(x)
    }

    pub fn scale(&self, s: CNum<T>) -> Self {
        PolyGauss { poly: self.poly.scale(s), gauss: self.gauss.clone() }
    }

    pub fn conj(&self) -> Self {
        PolyGauss { poly: self.poly.conj(), gauss: self.gauss.conj() }
    }

    /// ∂_j as an exact operation: (∂P − P·(2Mx − b)_j)·G.
    pub fn derivative_axis(&self, axis: usize) -> Self {
        let d = self.dim();
        let mut k = MultiIndex::zero(d);
        k.0[axis] = 1;
        // linear form (2Mx − b)_j
        let mut lin = Polynomial::zero(d);
        for col in 0..d {
            let mut n = MultiIndex::zero(d);
            n.0[col] = 1;
            lin.set(n, self.gauss.quadratic()[(axis, col)] * re(T::of(2.0)));
        }
        lin.set(
            MultiIndex::zero(d),
            -self.gauss.linear()[axis],
        );
        let poly = self.poly.derivative(&k).add(&self.poly.mul(&lin).scale(re(-T::one())));
        PolyGauss { poly, gauss: self.gauss.clone() }
    }

    pub fn derivative(&self, k: &MultiIndex) -> Self {
        let mut cur = self.clone();
        for axis in 0..self.dim() {
            for _ in 0..k.get(axis) {
                cur = cur.derivative_axis(axis);
            }
        }
        cur
    }

    /// ∫ P·G dx in closed form.
    pub fn integral(&self) -> Result<CNum<T>> {
        self.gauss.poly_moment_integral(&self.poly)
    }

    pub fn sample(&self, grid: &PhaseGrid<T>) -> Result<GridSymbol<T>> {
        GridSymbol::from_fn(grid, |x| self.eval(x))
    }
}

/// The exact star product of two polynomial×Gaussian symbols. For θ = 0 it
/// degenerates to the pointwise product.
pub fn star_exact<T: Scalar>(
    f: &PolyGauss<T>,
    g: &PolyGauss<T>,
    theta: &ThetaMatrix<T>,
) -> Result<PolyGauss<T>> {
    let d = f.dim();
    if g.dim() != d || theta.dim() != d {
        return Err(MoyalError::Representation("dimension mismatch".into()));
    }
    let nu = 2 * d;

    // pure-Gaussian product at the numeric linear parameters
    let gstar = f.gauss.star(&g.gauss, theta)?;

    // the coefficient data of E: A (d×nu) and Q⁻¹ (nu×nu)
    let (a_mat, q_inv) = if theta.is_zero() {
        let mut a = CMat::zeros(nu);
        // stored d×nu inside an nu×nu container: rows 0..d used
        for j in 0..d {
            a[(j, j)] = re(T::one());
            a[(j, d + j)] = re(T::one());
        }
        (a, CMat::zeros(nu))
    } else {
        let theta_inv = theta.inverse_entries()?;
        let mut q = CMat::zeros(nu);
        for i in 0..d {
            for j in 0..d {
                q[(i, j)] = f.gauss.quadratic()[(i, j)];
                q[(d + i, d + j)] = g.gauss.quadratic()[(i, j)];
                let t = theta_inv[i * d + j];
                q[(i, d + j)] = im::<T>() * re(t);
                q[(d + i, j)] = -(im::<T>() * re(t));
            }
        }
        let q_inv = linalg::inverse(&q)?;
        // S is nu×d: top block −2M₁, bottom −2M₂; A = [I I] + ½ SᵀQ⁻¹
        let minus_two = re(-T::of(2.0));
        let half = re(T::of(0.5));
        let mut a = CMat::zeros(nu);
        for j in 0..d {
            a[(j, j)] = re(T::one());
            a[(j, d + j)] = re(T::one());
        }
        for r in 0..d {
            // column r of S
            let mut s_col = vec![re(T::zero()); nu];
            for i in 0..d {
                s_col[i] = minus_two * f.gauss.quadratic()[(i, r)];
                s_col[d + i] = minus_two * g.gauss.quadratic()[(i, r)];
            }
            for i in 0..nu {
                let mut dot = re(T::zero());
                for k in 0..nu {
                    dot = dot + s_col[k] * q_inv[(k, i)];
                }
                a[(r, i)] = a[(r, i)] + half * dot;
            }
        }
        (a, q_inv)
    };

    // sanity: A·u_num must reproduce the numeric b⋆
    let u_num: Vec<CNum<T>> = f
        .gauss
        .linear()
        .iter()
        .chain(g.gauss.linear().iter())
        .copied()
        .collect();
    {
        let tol = T::exact_tol(1e-10)
            * (T::one() + u_num.iter().map(|z| z.norm()).fold(T::zero(), T::max));
        for j in 0..d {
            let mut acc = re(T::zero());
            for i in 0..nu {
                acc = acc + a_mat[(j, i)] * u_num[i];
            }
            debug_assert!(
                (acc - gstar.linear()[j]).norm() < tol * T::of(1e4),
                "generating-function linear term disagrees with the numeric product"
            );
        }
    }

    // ∂_{u_i}E as polynomials over (x₁..x_d, u₁..u_nu)
    let vars = d + nu;
    let de: Vec<Polynomial<T>> = (0..nu)
        .map(|i| {
            let mut p = Polynomial::zero(vars);
            for j in 0..d {
                if a_mat[(j, i)].norm() != T::zero() {
                    let mut n = MultiIndex::zero(vars);
                    n.0[j] = 1;
                    p.set(n, a_mat[(j, i)]);
                }
            }
            let half = re(T::of(0.5));
            for j in 0..nu {
                let c = half * q_inv[(i, j)];
                if c.norm() != T::zero() {
                    let mut n = MultiIndex::zero(vars);
                    n.0[d + j] = 1;
                    p.set(n, c);
                }
            }
            p
        })
        .collect();

    // R = Σ_{α,β} p_α q_β D^{(α,β)}(1), D_i(R) = ∂_{u_i}R + R·∂_{u_i}E
    let mut total = Polynomial::zero(vars);
    for (alpha, &pa) in f.poly.coeffs() {
        for (beta, &qb) in g.poly.coeffs() {
            let mut r = Polynomial::constant(vars, re(T::one()));
            for slot in 0..nu {
                let reps = if slot < d { alpha.get(slot) } else { beta.get(slot - d) };
                for _ in 0..reps {
                    let mut k = MultiIndex::zero(vars);
                    k.0[d + slot] = 1;
                    r = r.derivative(&k).add(&r.mul(&de[slot]));
                }
            }
            total = total.add(&r.scale(pa * qb));
        }
    }
    let poly = total.substitute_tail(d, &u_num);
    Ok(PolyGauss { poly, gauss: gstar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::starproduct::star_integral;
    use crate::symbol::Symbol;
    use num_complex::Complex64 as C64;

    fn theta_j(t0: f64) -> ThetaMatrix<f64> {
        ThetaMatrix::canonical(2, t0).unwrap()
    }

    fn coord_times_window(axis: usize, w: f64) -> PolyGauss<f64> {
        let window = Gaussian::isotropic(2, 1.0 / (w * w)).unwrap();
        PolyGauss::new(Polynomial::coordinate(2, axis), window)
    }

    #[test]
    fn pure_case_reduces_to_gaussian_star() {
        let g1 = Gaussian::<f64>::offset_isotropic(2, 0.8, &[0.2, -0.1]).unwrap();
        let g2 = Gaussian::<f64>::isotropic(2, 1.2).unwrap();
        let th = theta_j(0.9);
        let exact = star_exact(&PolyGauss::pure(g1.clone()), &PolyGauss::pure(g2.clone()), &th)
            .unwrap();
        let plain = g1.star(&g2, &th).unwrap();
        for x in [[0.0, 0.0], [0.7, -0.4], [1.5, 1.1]] {
            assert!((exact.eval(&x) - plain.eval(&x)).norm() < 1e-13);
        }
        // correction polynomial must be the constant 1
        assert_eq!(exact.poly.coeffs().len(), 1);
    }

    #[test]
    fn derivative_of_poly_gauss() {
        // ∂₁ [x₁ e^{−|x|²}] = (1 − 2x₁²) e^{−|x|²}
        let pg = coord_times_window(0, 1.0);
        let d1 = pg.derivative(&MultiIndex(vec![1, 0]));
        for x in [[0.3f64, -0.2], [1.0, 0.5]] {
            let want = (1.0 - 2.0 * x[0] * x[0]) * (-(x[0] * x[0] + x[1] * x[1])).exp();
            assert!((d1.eval(&x) - C64::new(want, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn exact_star_matches_grid_integral() {
        let grid = PhaseGrid::new(2, 8.0, 64).unwrap();
        let th = theta_j(1.0);
        // (x₁ + 0.5 x₂²)·e^{−0.9|x|²} ⋆ (1 + x₂)·e^{−0.8|x−a|²}
        let mut p1 = Polynomial::<f64>::zero(2);
        p1.set(MultiIndex(vec![1, 0]), C64::new(1.0, 0.0));
        p1.set(MultiIndex(vec![0, 2]), C64::new(0.5, 0.0));
        let f = PolyGauss::new(p1, Gaussian::isotropic(2, 0.9).unwrap());
        let mut p2 = Polynomial::<f64>::zero(2);
        p2.set(MultiIndex(vec![0, 0]), C64::new(1.0, 0.0));
        p2.set(MultiIndex(vec![0, 1]), C64::new(1.0, 0.0));
        let g = PolyGauss::new(p2, Gaussian::offset_isotropic(2, 0.8, &[0.3, -0.2]).unwrap());

        let exact = star_exact(&f, &g, &th).unwrap();

        let fs = Symbol::Grid(f.sample(&grid).unwrap());
        let gs = Symbol::Grid(g.sample(&grid).unwrap());
        let numeric = star_integral(&fs, &gs, &th, &grid).unwrap().value;
        let want = exact.sample(&grid).unwrap();
        let err = numeric.sup_diff(&want).unwrap();
        let scale = want.sup_norm();
        assert!(err / scale < 1e-9, "exact vs grid mismatch: {:.3e}", err / scale);
    }

    #[test]
    fn exact_star_is_associative() {
        let th = theta_j(0.7);
        let f = coord_times_window(0, 1.5);
        let g = coord_times_window(1, 2.0);
        let h = PolyGauss::pure(Gaussian::offset_isotropic(2, 0.9, &[0.2, 0.4]).unwrap());
        let left = star_exact(&star_exact(&f, &g, &th).unwrap(), &h, &th).unwrap();
        let right = star_exact(&f, &star_exact(&g, &h, &th).unwrap(), &th).unwrap();
        for x in [[0.0, 0.0], [0.8, -0.6], [1.4, 0.9]] {
            let a = left.eval(&x);
            let b = right.eval(&x);
            assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()), "at {x:?}: {a} vs {b}");
        }
    }

    #[test]
    fn windowed_commutator_approaches_canonical_value() {
        // [x¹W, x²W]⋆(0) = iθ₀ + O(w⁻⁴): widening the window must shrink the
        // deviation by ~(w₂/w₁)⁴
        let t0 = 1.0;
        let th = theta_j(t0);
        let dev = |w: f64| -> f64 {
            let f = coord_times_window(0, w);
            let g = coord_times_window(1, w);
            let fg = star_exact(&f, &g, &th).unwrap();
            let gf = star_exact(&g, &f, &th).unwrap();
            let c = fg.eval(&[0.0, 0.0]) - gf.eval(&[0.0, 0.0]);
            (c - C64::new(0.0, t0)).norm()
        };
        let d4 = dev(4.0);
        let d8 = dev(8.0);
        assert!(d4 > 0.0 && d8 > 0.0);
        let ratio = d4 / d8;
        assert!(
            (8.0..32.0).contains(&ratio),
            "deviation should fall like w⁻⁴: dev(4)={d4:.3e}, dev(8)={d8:.3e}, ratio {ratio:.2}"
        );
        // and a wide window reaches the canonical value to high accuracy
        assert!(dev(64.0) < 1e-6);
    }

    #[test]
    fn theta_zero_exact_star_is_pointwise() {
        let th = ThetaMatrix::zero(2).unwrap();
        let f = coord_times_window(0, 1.0);
        let g = coord_times_window(1, 1.3);
        let prod = star_exact(&f, &g, &th).unwrap();
        for x in [[0.4, 0.2], [-0.9, 1.0]] {
            let want = f.eval(&x) * g.eval(&x);
            assert!((prod.eval(&x) - want).norm() < 1e-14);
        }
    }
}
