//! Centered multi-dimensional FFT between the grid [−L, L)^d and its dual,
//! in the convention forward: f̂(q) = ∫ f e^{−iq·x} dx, inverse with
//! prefactor (2π)^{−d}. Arrays are stored in ascending coordinate order on
//! both sides; the phase bookkeeping against the raw DFT is exact, so
//! forward∘inverse is the identity to rounding.
//!
//! With nodes x_m = (m−N/2)Δx and q_k = (k−N/2)Δq, Δx·Δq = 2π/N:
//!   f̂_k = Δx^d (−1)^{Σk_j} · DFT[(−1)^{Σm_j} f]_k        (N divisible by 4)
//!   f_m = (2π)^{−d} Δq^d (−1)^{Σm_j} · IDFT[(−1)^{Σk_j} f̂]_m

use crate::grid::PhaseGrid;
use crate::multi_index::MultiIndex;
use crate::scalar::{re, CNum, Scalar};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Reusable line and FFT scratch buffers; one per thread in parallel loops.
pub struct FftWorkspace<T: Scalar> {
    line: Vec<CNum<T>>,
    scratch: Vec<CNum<T>>,
}

pub struct CenteredFft<T: Scalar> {
    grid: PhaseGrid<T>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// (−1)^{Σ m_j} per flat index.
    parity: Vec<bool>,
}

impl<T: Scalar> CenteredFft<T> {
    pub fn new(grid: &PhaseGrid<T>) -> Self {
        let n = grid.points_per_axis();
        debug_assert!(n % 4 == 0, "power-of-two N ≥ 4 keeps the center phase trivial");
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let parity = (0..grid.len())
            .map(|flat| grid.unravel(flat).iter().sum::<usize>() % 2 == 1)
            .collect();
        CenteredFft { grid: grid.clone(), fwd, inv, parity }
    }

    pub fn grid(&self) -> &PhaseGrid<T> {
        &self.grid
    }

    pub fn make_workspace(&self) -> FftWorkspace<T> {
        let n = self.grid.points_per_axis();
        let scratch_len = self
            .fwd
            .get_inplace_scratch_len()
            .max(self.inv.get_inplace_scratch_len());
        FftWorkspace {
            line: vec![CNum::new(T::zero(), T::zero()); n],
            scratch: vec![CNum::new(T::zero(), T::zero()); scratch_len],
        }
    }

    /// Dual-axis frequency values, ascending (the dual grid's axis nodes).
    pub fn freqs(&self) -> Vec<T> {
        self.grid.dual().axis_nodes()
    }

    fn apply_parity(&self, buf: &mut [CNum<T>]) {
        for (v, &odd) in buf.iter_mut().zip(&self.parity) {
            if odd {
                *v = -*v;
            }
        }
    }

    fn transform_all_axes(&self, buf: &mut [CNum<T>], forward: bool, ws: &mut FftWorkspace<T>) {
        let d = self.grid.dim();
        let n = self.grid.points_per_axis();
        let total = self.grid.len();
        let plan = if forward { &self.fwd } else { &self.inv };
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            let block = stride * n;
            let mut base = 0usize;
            while base < total {
                for off in 0..stride {
                    let start = base + off;
                    for t in 0..n {
                        ws.line[t] = buf[start + t * stride];
                    }
                    plan.process_with_scratch(&mut ws.line, &mut ws.scratch);
                    for t in 0..n {
                        buf[start + t * stride] = ws.line[t];
                    }
                }
                base += block;
            }
        }
    }

    /// In-place forward transform of samples already copied into `buf`.
    pub fn forward_mut(&self, buf: &mut [CNum<T>], ws: &mut FftWorkspace<T>) {
        assert_eq!(buf.len(), self.grid.len());
        self.apply_parity(buf);
        self.transform_all_axes(buf, true, ws);
        self.apply_parity(buf);
        let scale = re(self.grid.cell_volume());
        for v in buf.iter_mut() {
            *v = *v * scale;
        }
    }

    /// In-place inverse transform of dual samples already in `buf`.
    pub fn inverse_mut(&self, buf: &mut [CNum<T>], ws: &mut FftWorkspace<T>) {
        assert_eq!(buf.len(), self.grid.len());
        self.apply_parity(buf);
        self.transform_all_axes(buf, false, ws);
        self.apply_parity(buf);
        let d = self.grid.dim() as i32;
        let two_pi = T::PI() + T::PI();
        let scale = re(self.grid.dual_spacing().powi(d) / two_pi.powi(d));
        for v in buf.iter_mut() {
            *v = *v * scale;
        }
    }

    /// Forward transform: samples on the grid → samples of f̂ on the dual
    /// grid, ascending order.
    pub fn forward(&self, values: &[CNum<T>]) -> Vec<CNum<T>> {
        let mut buf = values.to_vec();
        let mut ws = self.make_workspace();
        self.forward_mut(&mut buf, &mut ws);
        buf
    }

    /// Inverse transform: samples of f̂ on the dual grid → samples on the
    /// grid.
    pub fn inverse(&self, values: &[CNum<T>]) -> Vec<CNum<T>> {
        let mut buf = values.to_vec();
        let mut ws = self.make_workspace();
        self.inverse_mut(&mut buf, &mut ws);
        buf
    }

    /// Per-axis tables e^{−i q·s_j} for a real shift.
    pub fn shift_tables(&self, shift: &[T]) -> Vec<Vec<CNum<T>>> {
        let freqs = self.freqs();
        (0..self.grid.dim())
            .map(|j| {
                freqs
                    .iter()
                    .map(|&q| CNum::from_polar(T::one(), -q * shift[j]))
                    .collect()
            })
            .collect()
    }

    /// Band-limited evaluation of f(x − s) at every grid node, from f̂.
    pub fn eval_shifted(&self, fhat: &[CNum<T>], shift: &[T]) -> Vec<CNum<T>> {
        assert_eq!(shift.len(), self.grid.dim());
        let tables = self.shift_tables(shift);
        let mut buf = fhat.to_vec();
        self.multiply_separable(&mut buf, &tables);
        self.inverse(&buf)
    }

    /// Band-limited single-point evaluation f(x) = (2π)^{−d} Δq^d Σ f̂(q) e^{iq·x}.
    pub fn eval_point(&self, fhat: &[CNum<T>], x: &[T]) -> CNum<T> {
        let d = self.grid.dim();
        let freqs = self.freqs();
        let tables: Vec<Vec<CNum<T>>> = (0..d)
            .map(|j| freqs.iter().map(|&q| CNum::from_polar(T::one(), q * x[j])).collect())
            .collect();
        let n = self.grid.points_per_axis();
        let mut idx = vec![0usize; d];
        let mut acc = CNum::new(T::zero(), T::zero());
        for &v in fhat.iter() {
            let mut factor = CNum::new(T::one(), T::zero());
            for j in 0..d {
                factor = factor * tables[j][idx[j]];
            }
            acc = acc + v * factor;
            for j in (0..d).rev() {
                idx[j] += 1;
                if idx[j] < n {
                    break;
                }
                idx[j] = 0;
            }
        }
        let two_pi = T::PI() + T::PI();
        acc * re(self.grid.dual_spacing().powi(d as i32) / two_pi.powi(d as i32))
    }

    /// Spectral derivative ∂^n f from f̂: multiply by Π (i q_j)^{n_j} and
    /// invert.
    pub fn derivative_from_hat(&self, fhat: &[CNum<T>], n: &MultiIndex) -> Vec<CNum<T>> {
        let d = self.grid.dim();
        assert_eq!(n.dim(), d);
        let freqs = self.freqs();
        let tables: Vec<Vec<CNum<T>>> = (0..d)
            .map(|j| {
                freqs
                    .iter()
                    .map(|&q| {
                        let iq = CNum::new(T::zero(), q);
                        let mut p = CNum::new(T::one(), T::zero());
                        for _ in 0..n.get(j) {
                            p = p * iq;
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        let mut buf = fhat.to_vec();
        self.multiply_separable(&mut buf, &tables);
        self.inverse(&buf)
    }

    /// Multiply a flat array elementwise by a separable factor Π_j t_j[k_j].
    pub fn multiply_separable(&self, buf: &mut [CNum<T>], tables: &[Vec<CNum<T>>]) {
        let d = self.grid.dim();
        let n = self.grid.points_per_axis();
        let mut idx = vec![0usize; d];
        for v in buf.iter_mut() {
            let mut factor = CNum::new(T::one(), T::zero());
            for j in 0..d {
                factor = factor * tables[j][idx[j]];
            }
            *v = *v * factor;
            // advance row-major counter
            for j in (0..d).rev() {
                idx[j] += 1;
                if idx[j] < n {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::Gaussian;
    use num_complex::Complex64 as C64;

    fn sample_gaussian(g: &Gaussian<f64>, grid: &PhaseGrid<f64>) -> Vec<C64> {
        (0..grid.len()).map(|i| g.eval(&grid.node(i))).collect()
    }

    #[test]
    fn roundtrip_is_identity() {
        let grid = PhaseGrid::<f64>::new(2, 6.0, 32).unwrap();
        let fft = CenteredFft::new(&grid);
        let g = Gaussian::offset_isotropic(2, 0.9, &[0.4, -0.7]).unwrap();
        let vals = sample_gaussian(&g, &grid);
        let back = fft.inverse(&fft.forward(&vals));
        let err = vals
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err / scale < 1e-12, "roundtrip error {err:.3e}");
    }

    #[test]
    fn forward_matches_gaussian_closed_form() {
        let grid = PhaseGrid::<f64>::new(1, 10.0, 64).unwrap();
        let fft = CenteredFft::new(&grid);
        let g = Gaussian::<f64>::isotropic(1, 0.5).unwrap();
        let vals = sample_gaussian(&g, &grid);
        let hat = fft.forward(&vals);
        let ghat = g.fourier_forward().unwrap();
        let dual = grid.dual();
        for k in (0..64).step_by(7) {
            let q = dual.axis_node(k);
            let want = ghat.eval(&[q]);
            assert!(
                (hat[k] - want).norm() < 1e-12,
                "at q={q}: got {} want {}",
                hat[k],
                want
            );
        }
    }

    #[test]
    fn shift_theorem() {
        let grid = PhaseGrid::<f64>::new(2, 8.0, 64).unwrap();
        let fft = CenteredFft::new(&grid);
        let g = Gaussian::<f64>::isotropic(2, 1.0).unwrap();
        let vals = sample_gaussian(&g, &grid);
        let hat = fft.forward(&vals);
        let s = [0.73, -0.41];
        let shifted = fft.eval_shifted(&hat, &s);
        let g_shifted = g.shift(&s).unwrap();
        let want = sample_gaussian(&g_shifted, &grid);
        let err = shifted
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "shift error {err:.3e}");
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let grid = PhaseGrid::<f64>::new(1, 8.0, 64).unwrap();
        let fft = CenteredFft::new(&grid);
        let g = Gaussian::<f64>::isotropic(1, 1.0).unwrap();
        let vals = sample_gaussian(&g, &grid);
        let hat = fft.forward(&vals);
        let d2 = fft.derivative_from_hat(&hat, &MultiIndex(vec![2]));
        // ∂² e^{−x²} = (4x² − 2) e^{−x²}
        for k in (0..64).step_by(5) {
            let x = grid.axis_node(k);
            let want = (4.0 * x * x - 2.0) * (-x * x).exp();
            assert!((d2[k].re - want).abs() < 1e-9, "at x={x}");
            assert!(d2[k].im.abs() < 1e-10);
        }
    }
}
