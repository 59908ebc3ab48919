//! Fourier transforms of symbols, the twisted convolution
//! (F ★̂_θ G)(q) = ∫ F(p) G(q−p) e^{(i/2)q·θp} dp, symplectic Fourier
//! transforms, and the bridge u ⋆_θ g = (π^d det θ)^{−1} u ★̂_{−4θ⁻¹} F_θ g.
//!
//! The Fourier convention is fixed here and only here: forward kernel
//! e^{−ip·x} with no prefactor, inverse with (2π)^{−d}.

use crate::duality::{twisted_conv_functional, Functional, Side};
use crate::error::{Flagged, GridWarning, MoyalError, Result};
use crate::fft::CenteredFft;
use crate::grid::PhaseGrid;
use crate::scalar::{re, CNum, Scalar};
use crate::symbol::{sample_into, GridSymbol, Symbol};
use crate::theta::ThetaMatrix;
use rayon::prelude::*;

/// Relative amplitude below which first-factor nodes are skipped in the
/// direct twisted-convolution kernel.
const AMPLITUDE_CUTOFF: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Fourier transform of a symbol. Grid symbols transform to their dual
/// grid by the centered FFT; Gaussians map exactly on their parameters.
/// Polynomials are rejected: their transform is not a function.
pub fn fourier<T: Scalar>(f: &Symbol<T>, direction: Direction) -> Result<Symbol<T>> {
    match f {
        Symbol::Polynomial(_) => Err(MoyalError::Representation(
            "the transform of a polynomial is not a function".into(),
        )),
        Symbol::Gaussian(g) => Ok(Symbol::Gaussian(match direction {
            Direction::Forward => g.fourier_forward()?,
            Direction::Inverse => g.fourier_inverse()?,
        })),
        Symbol::Grid(g) => {
            let out = match direction {
                Direction::Forward => {
                    let fft = CenteredFft::new(g.grid());
                    GridSymbol::new(g.grid().dual(), fft.forward(g.values()))?
                }
                Direction::Inverse => {
                    // the input lives on a dual grid; the primal is its dual
                    let primal = g.grid().dual();
                    let fft = CenteredFft::new(&primal);
                    GridSymbol::new(primal, fft.inverse(g.values()))?
                }
            };
            Ok(Symbol::Grid(out))
        }
    }
}

/// Direct-quadrature twisted convolution of two integrable symbols on a
/// common grid:
/// out(q) = Δ^d Σ_p F(p) G(q−p) e^{(i/2)q·θp}, with G's argument wrapped
/// periodically. The phase for fixed q is the separable plane wave
/// e^{−(i/2)(θq)·p}. Outputs are independent, so the parallel loop is
/// deterministic.
pub fn twisted_convolution<T: Scalar>(
    f: &Symbol<T>,
    g: &Symbol<T>,
    theta: &ThetaMatrix<T>,
    grid: &PhaseGrid<T>,
) -> Result<Flagged<GridSymbol<T>>> {
    if f.dim() != grid.dim() || g.dim() != grid.dim() || theta.dim() != grid.dim() {
        return Err(MoyalError::Representation("dimension mismatch".into()));
    }
    let mut warnings = Vec::new();
    let fs = sample_like_integrable(f, grid, &mut warnings)?;
    let gs = sample_like_integrable(g, grid, &mut warnings)?;

    let fsup = fs.sup_norm();
    if fsup == T::zero() {
        return Ok(Flagged::with(GridSymbol::zeros(grid), warnings));
    }
    let cutoff = fsup * T::of(AMPLITUDE_CUTOFF);
    let d = grid.dim();
    let n = grid.points_per_axis();
    // active first-factor nodes with their values and per-axis indices,
    // flattened to keep the inner loop allocation-free
    let mut active_vals: Vec<CNum<T>> = Vec::new();
    let mut active_idx: Vec<usize> = Vec::new();
    for i in 0..grid.len() {
        if fs.values()[i].norm() > cutoff {
            active_vals.push(fs.values()[i]);
            active_idx.extend(grid.unravel(i));
        }
    }

    let vol = grid.cell_volume();
    let axis_nodes = grid.axis_nodes();
    let half = T::of(0.5);

    let values: Vec<CNum<T>> = (0..grid.len())
        .into_par_iter()
        .map(|qflat| {
            let q = grid.node(qflat);
            let qidx = grid.unravel(qflat);
            // e^{(i/2)qθp} = Π_j e^{−(i/2)(θq)_j p_j}
            let theta_q = theta.times(&q);
            let tables: Vec<Vec<CNum<T>>> = (0..d)
                .map(|j| {
                    axis_nodes
                        .iter()
                        .map(|&p| CNum::from_polar(T::one(), -half * theta_q[j] * p))
                        .collect()
                })
                .collect();
            let mut acc = re(T::zero());
            // node m sits at coordinate (m − N/2)Δ, so the difference
            // coordinate q−p lives at index m_q − m_p + N/2 (mod N)
            for (t, &fval) in active_vals.iter().enumerate() {
                let pidx = &active_idx[t * d..t * d + d];
                let mut phase = CNum::new(T::one(), T::zero());
                let mut gflat = 0usize;
                for j in 0..d {
                    phase = phase * tables[j][pidx[j]];
                    gflat = gflat * n + (qidx[j] + n + n / 2 - pidx[j]) % n;
                }
                acc = acc + fval * gs.values()[gflat] * phase;
            }
            acc * re(vol)
        })
        .collect();

    let out = GridSymbol::new(grid.clone(), values)
        .map_err(|_| MoyalError::Numerical("NaN in twisted-convolution quadrature".into()))?;
    Ok(Flagged::with(out, warnings))
}

fn sample_like_integrable<T: Scalar>(
    s: &Symbol<T>,
    grid: &PhaseGrid<T>,
    warnings: &mut Vec<GridWarning>,
) -> Result<GridSymbol<T>> {
    match s {
        Symbol::Polynomial(_) => Err(MoyalError::Representation(
            "twisted convolution needs integrable operands".into(),
        )),
        Symbol::Grid(g) => {
            if g.grid() != grid {
                return Err(MoyalError::GridMismatch);
            }
            Ok(g.clone())
        }
        Symbol::Gaussian(_) => sample_into(s, grid, warnings),
    }
}

/// Sign convention of the symplectic transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymplecticSign {
    /// F_θ: kernel e^{−2i x·θ⁻¹ξ}.
    Minus,
    /// conjugated transform F̄_θ: kernel e^{+2i x·θ⁻¹ξ}.
    Plus,
}

/// Symplectic Fourier transform (F_θ g)(ξ) = ∫ g(x) e^{∓2i x·θ⁻¹ξ} dx.
/// Gaussians map exactly (the standard transform evaluated at ±2θ⁻¹ξ);
/// grid symbols are transformed by direct quadrature with separable
/// phases, on the same box. Output frequencies beyond the grid's Nyquist
/// band are flagged.
pub fn symplectic_fourier<T: Scalar>(
    g: &Symbol<T>,
    theta: &ThetaMatrix<T>,
    sign: SymplecticSign,
    grid: &PhaseGrid<T>,
) -> Result<Flagged<Symbol<T>>> {
    if !theta.is_invertible() {
        return Err(MoyalError::SingularTheta);
    }
    let d = theta.dim();
    let sgn = match sign {
        SymplecticSign::Minus => T::one(),
        SymplecticSign::Plus => -T::one(),
    };
    match g {
        Symbol::Polynomial(_) => Err(MoyalError::Representation(
            "the symplectic transform of a polynomial is not a function".into(),
        )),
        Symbol::Gaussian(gg) => {
            // ĝ(±2θ⁻¹ξ) as an exact parameter map
            let hat = gg.fourier_forward()?;
            let inv = theta.inverse_entries()?;
            let two = T::of(2.0);
            let a: Vec<T> = inv.iter().map(|&v| sgn * two * v).collect();
            Ok(Flagged::clean(Symbol::Gaussian(hat.substitute_linear(&a)?)))
        }
        Symbol::Grid(gg) => {
            if gg.grid() != grid {
                return Err(MoyalError::GridMismatch);
            }
            let mut warnings = Vec::new();
            // max output frequency: w(ξ) = ±2θ⁻¹ξ over the box
            let corner = vec![grid.half_extent(); d];
            let wmax = theta
                .inverse_times(&corner)?
                .iter()
                .map(|v| (T::of(2.0) * *v).abs())
                .fold(T::zero(), T::max);
            if wmax > grid.nyquist() {
                warnings.push(GridWarning::BandExceeded {
                    frequency: wmax.to_f64().unwrap_or(f64::NAN),
                    nyquist: grid.nyquist().to_f64().unwrap_or(f64::NAN),
                });
            }
            let axis_nodes = grid.axis_nodes();
            let vol = grid.cell_volume();
            let values: Vec<CNum<T>> = (0..grid.len())
                .into_par_iter()
                .map(|xiflat| {
                    let xi = grid.node(xiflat);
                    let w = theta.inverse_times(&xi).expect("invertible");
                    // e^{∓2i x·θ⁻¹ξ} = Π_j e^{∓2i x_j w_j}
                    let tables: Vec<Vec<CNum<T>>> = (0..d)
                        .map(|j| {
                            axis_nodes
                                .iter()
                                .map(|&x| {
                                    CNum::from_polar(
                                        T::one(),
                                        -sgn * T::of(2.0) * x * w[j],
                                    )
                                })
                                .collect()
                        })
                        .collect();
                    let n = grid.points_per_axis();
                    let mut idx = vec![0usize; d];
                    let mut acc = re(T::zero());
                    for &v in gg.values() {
                        let mut phase = CNum::new(T::one(), T::zero());
                        for j in 0..d {
                            phase = phase * tables[j][idx[j]];
                        }
                        acc = acc + v * phase;
                        for j in (0..d).rev() {
                            idx[j] += 1;
                            if idx[j] < n {
                                break;
                            }
                            idx[j] = 0;
                        }
                    }
                    acc * re(vol)
                })
                .collect();
            Ok(Flagged::with(
                Symbol::Grid(GridSymbol::new(grid.clone(), values)?),
                warnings,
            ))
        }
    }
}

/// The operand the bridge identity multiplies with a test symbol: either a
/// plain symbol or a functional with an exact pairing rule.
pub enum StarOperand<'a, T: Scalar> {
    Symbol(&'a Symbol<T>),
    Functional(&'a Functional<T>),
}

/// Star product through the twisted-convolution bridge at −4θ⁻¹:
/// left: u ⋆_θ g = (π^d det θ)^{−1} · (u ★̂_{−4θ⁻¹} F_θ g),
/// right: g ⋆_θ u = (π^d det θ)^{−1} · (F̄_θ g ★̂_{−4θ⁻¹} u).
pub fn star_via_twisted<T: Scalar>(
    u: StarOperand<'_, T>,
    g: &Symbol<T>,
    theta: &ThetaMatrix<T>,
    side: Side,
    grid: &PhaseGrid<T>,
) -> Result<Flagged<GridSymbol<T>>> {
    if !theta.is_invertible() {
        return Err(MoyalError::SingularTheta);
    }
    let d = theta.dim();
    let bridge = theta.bridge()?;
    let pref = T::one() / (T::PI().powi(d as i32) * theta.det());
    let mut warnings = Vec::new();

    let transformed = match side {
        Side::Left => symplectic_fourier(g, theta, SymplecticSign::Minus, grid)?,
        Side::Right => symplectic_fourier(g, theta, SymplecticSign::Plus, grid)?,
    };
    warnings.extend(transformed.warnings);
    let h = transformed.value;

    let conv = match (&u, side) {
        (StarOperand::Symbol(us), Side::Left) => twisted_convolution(us, &h, &bridge, grid)?,
        (StarOperand::Symbol(us), Side::Right) => twisted_convolution(&h, us, &bridge, grid)?,
        (StarOperand::Functional(uf), side) => {
            twisted_conv_functional(uf, &h, &bridge, side, grid)?
        }
    };
    warnings.extend(conv.warnings);
    Ok(Flagged::with(conv.value.scale(re(pref)), warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::Gaussian;
    use crate::starproduct::star_integral;
    use crate::symbol::sample;

    fn theta_j(t0: f64) -> ThetaMatrix<f64> {
        ThetaMatrix::canonical(2, t0).unwrap()
    }

    fn rel_sup_diff(a: &GridSymbol<f64>, b: &GridSymbol<f64>) -> f64 {
        a.sup_diff(b).unwrap() / b.sup_norm()
    }

    #[test]
    fn fourier_roundtrip_on_grid() {
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let g = Symbol::Gaussian(Gaussian::offset_isotropic(2, 0.9, &[0.3, -0.5]).unwrap());
        let s = Symbol::Grid(sample(&g, &grid).unwrap().symbol);
        let hat = fourier(&s, Direction::Forward).unwrap();
        let back = fourier(&hat, Direction::Inverse).unwrap();
        let (Symbol::Grid(orig), Symbol::Grid(b)) = (&s, &back) else { panic!() };
        assert!(rel_sup_diff(b, orig) < 1e-12);
    }

    #[test]
    fn fourier_rejects_polynomial() {
        let p = Symbol::Polynomial(crate::poly::Polynomial::<f64>::coordinate(2, 0));
        assert!(matches!(
            fourier(&p, Direction::Forward),
            Err(MoyalError::Representation(_))
        ));
    }

    #[test]
    fn twisted_at_theta_zero_is_plain_convolution() {
        // θ=0: direct kernel equals the FFT convolution theorem result
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let th = ThetaMatrix::zero(2).unwrap();
        let f = Symbol::Gaussian(Gaussian::isotropic(2, 1.0).unwrap());
        let g = Symbol::Gaussian(Gaussian::offset_isotropic(2, 0.8, &[0.3, 0.1]).unwrap());
        let direct = twisted_convolution(&f, &g, &th, &grid).unwrap().value;
        // F∗G = F⁻¹[F̂ Ĝ]
        let fft = CenteredFft::new(&grid);
        let fs = sample(&f, &grid).unwrap().symbol;
        let gs = sample(&g, &grid).unwrap().symbol;
        let fh = fft.forward(fs.values());
        let gh = fft.forward(gs.values());
        let prod: Vec<_> = fh.iter().zip(&gh).map(|(&a, &b)| a * b).collect();
        let conv = GridSymbol::new(grid.clone(), fft.inverse(&prod)).unwrap();
        assert!(direct.sup_diff(&conv).unwrap() / conv.sup_norm() < 1e-10);
    }

    #[test]
    fn convolution_bridge_identity() {
        // F(f⋆g) = (2π)^{−d} f̂ ★̂ ĝ on the dual grid
        let grid = PhaseGrid::new(2, 8.0, 64).unwrap();
        let th = theta_j(1.0);
        let f = Symbol::Gaussian(Gaussian::offset_isotropic(2, 1.0, &[0.2, -0.1]).unwrap());
        let g = Symbol::Gaussian(Gaussian::offset_isotropic(2, 0.8, &[-0.3, 0.2]).unwrap());
        let fg = star_integral(&f, &g, &th, &grid).unwrap().value;
        let lhs = fourier(&Symbol::Grid(fg), Direction::Forward).unwrap();

        let dual = grid.dual();
        let fhat = fourier(&Symbol::Grid(sample(&f, &grid).unwrap().symbol), Direction::Forward)
            .unwrap();
        let ghat = fourier(&Symbol::Grid(sample(&g, &grid).unwrap().symbol), Direction::Forward)
            .unwrap();
        let conv = twisted_convolution(&fhat, &ghat, &th, &dual).unwrap().value;
        let scaled = conv.scale(num_complex::Complex64::new(
            1.0 / (2.0 * std::f64::consts::PI).powi(2),
            0.0,
        ));
        let Symbol::Grid(lhs) = lhs else { panic!() };
        let rel = lhs.sup_diff(&scaled).unwrap() / scaled.sup_norm();
        assert!(rel < 1e-10, "bridge identity violated: {rel:.3e}");
    }

    #[test]
    fn symplectic_gaussian_matches_grid_path() {
        // output frequencies reach 2L/θ₀ = 16, so N must put Nyquist above
        let grid = PhaseGrid::new(2, 8.0, 128).unwrap();
        let th = theta_j(1.0);
        let g = Gaussian::<f64>::offset_isotropic(2, 0.9, &[0.4, 0.1]).unwrap();
        let exact = symplectic_fourier(
            &Symbol::Gaussian(g.clone()),
            &th,
            SymplecticSign::Minus,
            &grid,
        )
        .unwrap()
        .value;
        let gs = Symbol::Grid(sample(&Symbol::Gaussian(g), &grid).unwrap().symbol);
        let numeric = symplectic_fourier(&gs, &th, SymplecticSign::Minus, &grid).unwrap().value;
        let Symbol::Gaussian(eg) = exact else { panic!() };
        let want = sample(&Symbol::Gaussian(eg), &grid).unwrap().symbol;
        let Symbol::Grid(num) = numeric else { panic!() };
        assert!(rel_sup_diff(&num, &want) < 1e-11);
    }

    #[test]
    fn symplectic_double_transform_scales_by_pi_d_det() {
        // F_θ(F_θ g) = π^d det θ · g for any g; F̄_θ(F_θ g) adds a reflection,
        // so on even symbols both give π^d det θ · g
        let grid = PhaseGrid::new(2, 8.0, 64).unwrap();
        for t0 in [1.0, 2.0] {
            let th = theta_j(t0);
            let g = Gaussian::<f64>::isotropic(2, 0.8).unwrap();
            let sym = Symbol::Gaussian(g.clone());
            let once =
                symplectic_fourier(&sym, &th, SymplecticSign::Minus, &grid).unwrap().value;
            let twice =
                symplectic_fourier(&once, &th, SymplecticSign::Minus, &grid).unwrap().value;
            let Symbol::Gaussian(tg) = twice else { panic!() };
            let factor = std::f64::consts::PI.powi(2) * th.det();
            for x in [[0.0, 0.0], [0.7, -0.5], [1.3, 0.9]] {
                let want = g.eval(&x) * factor;
                assert!((tg.eval(&x) - want).norm() < 1e-11 * factor, "θ₀={t0}, x={x:?}");
            }
            // offset (non-even) Gaussian: F_θF_θ still scales, no reflection
            let go = Gaussian::<f64>::offset_isotropic(2, 0.8, &[0.5, -0.3]).unwrap();
            let once = symplectic_fourier(
                &Symbol::Gaussian(go.clone()),
                &th,
                SymplecticSign::Minus,
                &grid,
            )
            .unwrap()
            .value;
            let twice =
                symplectic_fourier(&once, &th, SymplecticSign::Minus, &grid).unwrap().value;
            let Symbol::Gaussian(tg) = twice else { panic!() };
            for x in [[0.4, 0.2], [-0.6, 1.0]] {
                let want = go.eval(&x) * factor;
                assert!((tg.eval(&x) - want).norm() < 1e-11 * factor);
            }
        }
    }

    #[test]
    fn symplectic_linearity() {
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let th = theta_j(1.0);
        let a = num_complex::Complex64::new(0.7, -0.2);
        let b = num_complex::Complex64::new(-1.1, 0.4);
        let f = sample(
            &Symbol::Gaussian(Gaussian::isotropic(2, 1.0).unwrap()),
            &grid,
        )
        .unwrap()
        .symbol;
        let g = sample(
            &Symbol::Gaussian(Gaussian::offset_isotropic(2, 0.7, &[0.3, -0.2]).unwrap()),
            &grid,
        )
        .unwrap()
        .symbol;
        let combo = Symbol::Grid(f.scale(a).add(&g.scale(b)).unwrap());
        let lhs = symplectic_fourier(&combo, &th, SymplecticSign::Plus, &grid).unwrap().value;
        let fa = symplectic_fourier(&Symbol::Grid(f), &th, SymplecticSign::Plus, &grid)
            .unwrap()
            .value;
        let gb = symplectic_fourier(&Symbol::Grid(g), &th, SymplecticSign::Plus, &grid)
            .unwrap()
            .value;
        let (Symbol::Grid(l), Symbol::Grid(fa), Symbol::Grid(gb)) = (lhs, fa, gb) else {
            panic!()
        };
        let want = fa.scale(a).add(&gb.scale(b)).unwrap();
        assert!(l.sup_diff(&want).unwrap() <= 1e-12 * want.sup_norm());
    }

    #[test]
    fn bridge_star_matches_integral_star() {
        let grid = PhaseGrid::new(2, 8.0, 128).unwrap();
        let th = theta_j(1.0);
        let u = Symbol::Gaussian(Gaussian::offset_isotropic(2, 1.0, &[0.2, 0.1]).unwrap());
        let g = Symbol::Gaussian(Gaussian::offset_isotropic(2, 0.7, &[-0.2, 0.3]).unwrap());
        let direct = star_integral(&u, &g, &th, &grid).unwrap().value;
        let bridged = star_via_twisted(StarOperand::Symbol(&u), &g, &th, Side::Left, &grid)
            .unwrap()
            .value;
        let rel = rel_sup_diff(&bridged, &direct);
        assert!(rel < 1e-9, "left bridge mismatch: {rel:.3e}");
        // right side computes g ⋆ u
        let direct_r = star_integral(&g, &u, &th, &grid).unwrap().value;
        let bridged_r = star_via_twisted(StarOperand::Symbol(&u), &g, &th, Side::Right, &grid)
            .unwrap()
            .value;
        let rel_r = rel_sup_diff(&bridged_r, &direct_r);
        assert!(rel_r < 1e-9, "right bridge mismatch: {rel_r:.3e}");
    }

    #[test]
    fn bridge_with_identity_functional_returns_g() {
        let grid = PhaseGrid::new(2, 8.0, 128).unwrap();
        let th = theta_j(1.0);
        let one = Functional::One { d: 2 };
        let g = Symbol::Gaussian(Gaussian::offset_isotropic(2, 0.8, &[0.3, -0.1]).unwrap());
        let out = star_via_twisted(StarOperand::Functional(&one), &g, &th, Side::Left, &grid)
            .unwrap()
            .value;
        let want = sample(&g, &grid).unwrap().symbol;
        let rel = rel_sup_diff(&out, &want);
        assert!(rel < 1e-10, "𝟙⋆g must equal g: {rel:.3e}");
    }

    #[test]
    fn bridge_matrix_arithmetic_for_canonical_theta() {
        // θ = J in d=2: −4J⁻¹ = 4J, det θ = 1, prefactor π^{−2}
        let th = theta_j(1.0);
        let b = th.bridge().unwrap();
        assert!((b.entry(0, 1) - 4.0).abs() < 1e-14);
        assert!((b.entry(1, 0) + 4.0).abs() < 1e-14);
        assert!((th.det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_theta_rejected() {
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let th = ThetaMatrix::zero(2).unwrap();
        let g = Symbol::Gaussian(Gaussian::isotropic(2, 1.0).unwrap());
        assert!(matches!(
            symplectic_fourier(&g, &th, SymplecticSign::Minus, &grid),
            Err(MoyalError::SingularTheta)
        ));
        assert!(matches!(
            star_via_twisted(StarOperand::Symbol(&g), &g, &th, Side::Left, &grid),
            Err(MoyalError::SingularTheta)
        ));
    }
}
