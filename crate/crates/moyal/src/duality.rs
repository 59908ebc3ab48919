//! Distribution-like symbols with exact pairing rules, the duality
//! extension ⟨u⋆f, g⟩ = ⟨u, f⋆g⟩ of the star product, the functional
//! twisted convolution (v★̂g)(q) = ⟨v, g(q−·)e^{(i/2)qθ(·)}⟩, the
//! involution ⟨u*, f⟩ = conj⟨u, f*⟩, and the dilation approximation of the
//! identity e_ν(x) = e(x/ν).

use crate::error::{Flagged, GridWarning, MoyalError, Result};
use crate::fft::CenteredFft;
use crate::gaussian::{Gaussian, GaussMomentPlan};
use crate::gausspoly::PolyGauss;
use crate::grid::PhaseGrid;
use crate::scalar::{re, CNum, Scalar};
use crate::symbol::{symbol_from_json, symbol_to_json, GridSymbol, Symbol};
use crate::theta::ThetaMatrix;
use rayon::prelude::*;

/// Grid-tail ratio beyond which quadrature pairings against slowly decaying
/// grid symbols are flagged.
const PAIR_TAIL_RATIO: f64 = 1e-10;

/// Nodes per axis of the dilation-adapted quadrature in
/// `approx_identity_error`.
const OMEGA_NODES: usize = 48;

/// A dual-space element with an exact pairing rule.
#[derive(Debug, Clone)]
pub enum Functional<T: Scalar> {
    /// Point evaluation ⟨δ_ξ, f⟩ = f(ξ).
    Delta { xi: Vec<T> },
    /// ⟨u, f⟩ = ∫ e^{ik·x} f(x) dx = f̂(−k).
    PlaneWave { k: Vec<T> },
    /// 𝟙: f ↦ ∫ f dx, the identity of the multiplier algebras.
    One { d: usize },
    /// Regular functional with density p·G: f ↦ ∫ p G f dx.
    PolyGaussianDensity(PolyGauss<T>),
}

impl<T: Scalar> Functional<T> {
    pub fn dim(&self) -> usize {
        match self {
            Functional::Delta { xi } => xi.len(),
            Functional::PlaneWave { k } => k.len(),
            Functional::One { d } => *d,
            Functional::PolyGaussianDensity(pg) => pg.dim(),
        }
    }

    /// The density as a symbol, where one exists (regular functionals only).
    pub fn density(&self) -> Option<PolyGauss<T>> {
        match self {
            Functional::PolyGaussianDensity(pg) => Some(pg.clone()),
            _ => None,
        }
    }
}

/// ⟨u, f⟩: closed form against Gaussian/polynomial symbols, trapezoid
/// quadrature against grid symbols.
pub fn pair<T: Scalar>(u: &Functional<T>, f: &Symbol<T>) -> Result<Flagged<CNum<T>>> {
    if u.dim() != f.dim() {
        return Err(MoyalError::Representation("functional/symbol dimension mismatch".into()));
    }
    let mut warnings = Vec::new();
    let value = match (u, f) {
        (Functional::Delta { xi }, Symbol::Polynomial(p)) => p.eval(xi),
        (Functional::Delta { xi }, Symbol::Gaussian(g)) => g.eval(xi),
        (Functional::Delta { xi }, Symbol::Grid(g)) => {
            let fft = CenteredFft::new(g.grid());
            let hat = fft.forward(g.values());
            fft.eval_point(&hat, xi)
        }
        (Functional::PlaneWave { k }, Symbol::Gaussian(g)) => {
            let hat = g.fourier_forward()?;
            let neg_k: Vec<T> = k.iter().map(|&v| -v).collect();
            hat.eval(&neg_k)
        }
        (Functional::PlaneWave { .. }, Symbol::Polynomial(_)) => {
            return Err(MoyalError::Representation(
                "plane wave pairs only with integrable symbols".into(),
            ));
        }
        (Functional::PlaneWave { k }, Symbol::Grid(g)) => {
            tail_warning(g, &mut warnings);
            let grid = g.grid();
            let mut acc = re(T::zero());
            for (i, &v) in g.values().iter().enumerate() {
                let x = grid.node(i);
                let phase: T = k.iter().zip(&x).map(|(&kj, &xj)| kj * xj).sum();
                acc = acc + v * CNum::from_polar(T::one(), phase);
            }
            acc * re(grid.cell_volume())
        }
        (Functional::One { .. }, Symbol::Gaussian(g)) => g.integral()?,
        (Functional::One { .. }, Symbol::Polynomial(_)) => {
            return Err(MoyalError::Representation(
                "the identity functional pairs only with integrable symbols".into(),
            ));
        }
        (Functional::One { .. }, Symbol::Grid(g)) => {
            tail_warning(g, &mut warnings);
            g.integral()
        }
        (Functional::PolyGaussianDensity(pg), Symbol::Gaussian(g)) => {
            let combined = pg.gauss.product(g)?;
            combined.poly_moment_integral(&pg.poly)?
        }
        (Functional::PolyGaussianDensity(pg), Symbol::Polynomial(p)) => {
            pg.gauss.poly_moment_integral(&pg.poly.mul(p))?
        }
        (Functional::PolyGaussianDensity(pg), Symbol::Grid(g)) => {
            let grid = g.grid();
            let mut acc = re(T::zero());
            for (i, &v) in g.values().iter().enumerate() {
                acc = acc + pg.eval(&grid.node(i)) * v;
            }
            acc * re(grid.cell_volume())
        }
    };
    Ok(Flagged::with(value, warnings))
}

fn tail_warning<T: Scalar>(g: &GridSymbol<T>, warnings: &mut Vec<GridWarning>) {
    let peak = g.sup_norm();
    if peak > T::zero() {
        let ratio = g.boundary_max() / peak;
        if ratio > T::of(PAIR_TAIL_RATIO) {
            warnings.push(GridWarning::TooSmall {
                boundary_ratio: ratio.to_f64().unwrap_or(f64::NAN),
                context: "grid symbol tail in functional pairing".into(),
            });
        }
    }
}

/// Which side of the star product the functional sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// ⟨u⋆f, g⟩ (left) or ⟨f⋆u, g⟩ (right) through the duality definition:
/// ⟨u⋆f, g⟩ = ⟨u, f⋆g⟩ and ⟨f⋆u, g⟩ = ⟨u, g⋆f⟩. The probe and f must be
/// Gaussian, so the inner star product is evaluated exactly in its
/// integral form and the pairing is closed-form for every variant.
pub fn star_functional<T: Scalar>(
    u: &Functional<T>,
    f: &Gaussian<T>,
    theta: &ThetaMatrix<T>,
    side: Side,
    g_probe: &Gaussian<T>,
) -> Result<CNum<T>> {
    let inner = match side {
        Side::Left => f.star(g_probe, theta)?,
        Side::Right => g_probe.star(f, theta)?,
    };
    Ok(pair(u, &Symbol::Gaussian(inner))?.value)
}

/// The functional involution u ↦ u*: parameter conjugation per variant.
pub fn involute<T: Scalar>(u: &Functional<T>) -> Functional<T> {
    match u {
        Functional::Delta { xi } => Functional::Delta { xi: xi.clone() },
        Functional::PlaneWave { k } => {
            Functional::PlaneWave { k: k.iter().map(|&v| -v).collect() }
        }
        Functional::One { d } => Functional::One { d: *d },
        Functional::PolyGaussianDensity(pg) => Functional::PolyGaussianDensity(pg.conj()),
    }
}

/// (v★̂g)(q) = ⟨v, g(q−·)e^{+(i/2)qθ(·)}⟩ (left) or
/// (g★̂v)(q) = ⟨v, g(q−·)e^{−(i/2)qθ(·)}⟩ (right), evaluated at every node
/// of `grid`. Gaussian g uses the exact pairing per node; grid g uses
/// quadrature.
pub fn twisted_conv_functional<T: Scalar>(
    v: &Functional<T>,
    g: &Symbol<T>,
    theta: &ThetaMatrix<T>,
    side: Side,
    grid: &PhaseGrid<T>,
) -> Result<Flagged<GridSymbol<T>>> {
    let d = grid.dim();
    if v.dim() != d || g.dim() != d || theta.dim() != d {
        return Err(MoyalError::Representation("dimension mismatch".into()));
    }
    let sign = match side {
        Side::Left => T::one(),
        Side::Right => -T::one(),
    };
    let half = T::of(0.5);
    let mut warnings = Vec::new();

    // kernel modulation vector: e^{s(i/2)qθy} = e^{i k(q)·y} with
    // k(q) = −s·(θq)/2
    let kernel_k = |q: &[T]| -> Vec<T> {
        theta.times(q).into_iter().map(|v| -sign * half * v).collect()
    };

    let values: Vec<CNum<T>> = match g {
        Symbol::Gaussian(gg) => {
            match v {
                Functional::PolyGaussianDensity(pg) => {
                    // combined quadratic form is q-independent: plan once
                    let m_comb = pg.gauss.quadratic().add(gg.quadratic());
                    let plan = GaussMomentPlan::new(m_comb)?;
                    (0..grid.len())
                        .into_par_iter()
                        .map(|i| {
                            let q = grid.node(i);
                            let h = gg
                                .reflect_shift(&q)
                                .expect("reflect keeps Re(M) definite")
                                .modulate(&kernel_k(&q))
                                .expect("modulation keeps Re(M) definite");
                            let b: Vec<CNum<T>> = pg
                                .gauss
                                .linear()
                                .iter()
                                .zip(h.linear())
                                .map(|(&a, &c)| a + c)
                                .collect();
                            let c = pg.gauss.constant() + h.constant();
                            plan.integral(&b, c, &pg.poly)
                        })
                        .collect()
                }
                _ => (0..grid.len())
                    .into_par_iter()
                    .map(|i| {
                        let q = grid.node(i);
                        let h = gg
                            .reflect_shift(&q)
                            .expect("reflect keeps Re(M) definite")
                            .modulate(&kernel_k(&q))
                            .expect("modulation keeps Re(M) definite");
                        match v {
                            Functional::Delta { xi } => h.eval(xi),
                            Functional::One { .. } => h.integral().expect("Re(M) definite"),
                            Functional::PlaneWave { k } => {
                                h.modulate(k).expect("modulation").integral().expect("integral")
                            }
                            Functional::PolyGaussianDensity(_) => unreachable!(),
                        }
                    })
                    .collect(),
            }
        }
        Symbol::Grid(gg) => {
            if gg.grid() != grid {
                return Err(MoyalError::GridMismatch);
            }
            tail_warning(gg, &mut warnings);
            match v {
                Functional::Delta { xi } => {
                    // g(q−ξ) via exact Fourier shift of the interpolant
                    let fft = CenteredFft::new(grid);
                    let hat = fft.forward(gg.values());
                    let shifted = fft.eval_shifted(&hat, xi);
                    // value at node q is (shifted symbol) at q, times phase
                    (0..grid.len())
                        .map(|i| {
                            let q = grid.node(i);
                            let kq = kernel_k(&q);
                            let phase: T =
                                kq.iter().zip(xi).map(|(&a, &b)| a * b).sum();
                            shifted[i] * CNum::from_polar(T::one(), phase)
                        })
                        .collect()
                }
                _ => {
                    // density samples for the regular variants
                    let density: Option<Vec<CNum<T>>> = match v {
                        Functional::One { .. } => None,
                        Functional::PlaneWave { .. } => None,
                        Functional::PolyGaussianDensity(pg) => Some(
                            (0..grid.len()).map(|i| pg.eval(&grid.node(i))).collect(),
                        ),
                        Functional::Delta { .. } => unreachable!(),
                    };
                    let pw_k: Option<Vec<T>> = match v {
                        Functional::PlaneWave { k } => Some(k.clone()),
                        _ => None,
                    };
                    let n = grid.points_per_axis();
                    let vol = grid.cell_volume();
                    let axis_nodes = grid.axis_nodes();
                    (0..grid.len())
                        .into_par_iter()
                        .map(|qflat| {
                            let q = grid.node(qflat);
                            let kq = kernel_k(&q);
                            let qidx = grid.unravel(qflat);
                            // phase tables e^{i(kq + k_pw)·y} per axis
                            let tables: Vec<Vec<CNum<T>>> = (0..d)
                                .map(|j| {
                                    let kj = kq[j]
                                        + pw_k.as_ref().map_or(T::zero(), |k| k[j]);
                                    axis_nodes
                                        .iter()
                                        .map(|&y| CNum::from_polar(T::one(), kj * y))
                                        .collect()
                                })
                                .collect();
                            let mut acc = re(T::zero());
                            let mut yidx = vec![0usize; d];
                            // difference coordinate q−y sits at index
                            // m_q − m_y + N/2 (mod N) on the centered grid
                            for yflat in 0..grid.len() {
                                let mut phase = CNum::new(T::one(), T::zero());
                                let mut gflat = 0usize;
                                for j in 0..d {
                                    phase = phase * tables[j][yidx[j]];
                                    gflat = gflat * n + (qidx[j] + n + n / 2 - yidx[j]) % n;
                                }
                                let gval = gg.values()[gflat];
                                let w = match &density {
                                    Some(dv) => dv[yflat],
                                    None => re(T::one()),
                                };
                                acc = acc + w * gval * phase;
                                for j in (0..d).rev() {
                                    yidx[j] += 1;
                                    if yidx[j] < n {
                                        break;
                                    }
                                    yidx[j] = 0;
                                }
                            }
                            acc * re(vol)
                        })
                        .collect()
                }
            }
        }
        Symbol::Polynomial(_) => {
            return Err(MoyalError::Representation(
                "twisted convolution needs an integrable second factor".into(),
            ));
        }
    };
    Ok(Flagged::with(GridSymbol::new(grid.clone(), values)?, warnings))
}

/// Result of the approximation-of-identity check at one dilation ν.
#[derive(Debug, Clone, Copy)]
pub struct ApproxIdentityError<T: Scalar> {
    /// sup over grid nodes of |f ⋆ e_ν − f| (or the left-sided product).
    pub err: T,
    /// |∫ ω_ν(q) dq − 1| with ω_ν(q) = (ν/2π)^d ê(νq); must vanish since
    /// the integral equals e(0) = 1.
    pub omega_check: T,
}

/// Error of the dilation approximation of the identity:
/// builds e_ν(x) = e(x/ν), evaluates
/// (f ⋆ e_ν)(x) = ∫ ω_ν(q) f(x − θq/2) e^{iq·x} dq on a quadrature box
/// adapted to the dilation (ω_ν concentrates at scale 1/ν, far below the
/// dual grid's resolution for large ν), and takes the plain grid sup of
/// the deviation from f.
pub fn approx_identity_error<T: Scalar>(
    f: &Symbol<T>,
    e: &Symbol<T>,
    nu: u32,
    theta: &ThetaMatrix<T>,
    side: Side,
    grid: &PhaseGrid<T>,
) -> Result<Flagged<ApproxIdentityError<T>>> {
    let d = grid.dim();
    if f.dim() != d || e.dim() != d {
        return Err(MoyalError::Representation("dimension mismatch".into()));
    }
    if nu == 0 {
        return Err(MoyalError::DegenerateInput("ν must be ≥ 1".into()));
    }
    let Symbol::Gaussian(eg) = e else {
        return Err(MoyalError::Representation(
            "the identity profile e must be Gaussian-class".into(),
        ));
    };
    let e0 = eg.eval(&vec![T::zero(); d]);
    if (e0 - re(T::one())).norm() > T::exact_tol(1e-12) {
        return Err(MoyalError::Normalization { value: format!("{e0}") });
    }

    let mut warnings = Vec::new();
    let nu_t = T::of_usize(nu as usize);

    // ω_ν(q) = (ν/2π)^d ê(νq) as an exact Gaussian
    let ehat = eg.fourier_forward()?;
    let mut scale_mat = vec![T::zero(); d * d];
    for j in 0..d {
        scale_mat[j * d + j] = nu_t;
    }
    let two_pi = T::PI() + T::PI();
    let omega = ehat
        .substitute_linear(&scale_mat)?
        .scale_log(re(T::of_usize(d as usize) * (nu_t.ln() - two_pi.ln())));

    // per-axis quadrature half-extent: solve m t² − |b| t = K with
    // K = ln 1e18, then pad
    let kdecay = T::of(1e18).ln();
    let mut extents = vec![T::zero(); d];
    for j in 0..d {
        let m = omega.quadratic()[(j, j)].re;
        let b = omega.linear()[j].re.abs();
        if !(m > T::zero()) {
            return Err(MoyalError::Numerical("dilated profile does not decay".into()));
        }
        let disc = (b * b + T::of(4.0) * m * kdecay).sqrt();
        extents[j] = (b + disc) / (m + m) * T::of(1.5);
    }

    // trapezoid nodes and the normalization check
    let mq = OMEGA_NODES;
    let deltas: Vec<T> = extents.iter().map(|&r| (r + r) / T::of_usize(mq)).collect();
    let vol: T = deltas.iter().fold(T::one(), |a, &b| a * b);
    let total_nodes = mq.pow(d as u32);
    let qvec_of = |flat: usize| -> Vec<T> {
        let mut rest = flat;
        let mut q = vec![T::zero(); d];
        for j in (0..d).rev() {
            let m = rest % mq;
            rest /= mq;
            q[j] = -extents[j] + deltas[j] * T::of_usize(m);
        }
        q
    };
    let mut omega_sum = re(T::zero());
    let mut omega_vals = Vec::with_capacity(total_nodes);
    for flat in 0..total_nodes {
        let q = qvec_of(flat);
        let w = omega.eval(&q);
        omega_sum = omega_sum + w;
        omega_vals.push(w);
    }
    let omega_check = (omega_sum * re(vol) - re(T::one())).norm();

    // shift sign: right side f⋆e_ν uses f(x − θq/2), left side f(x + θq/2)
    let shift_sign = match side {
        Side::Right => -T::one(),
        Side::Left => T::one(),
    };
    let half = T::of(0.5);

    // warn when the θ-shift drags a grid-sampled f around the torus
    let max_q: T = extents.iter().fold(T::zero(), |a, &b| a.max(b));
    if matches!(f, Symbol::Grid(_)) {
        let max_shift = theta.abs_sum() * half * max_q;
        if max_shift > grid.half_extent() {
            warnings.push(GridWarning::TooSmall {
                boundary_ratio: (max_shift / grid.half_extent()).to_f64().unwrap_or(f64::NAN),
                context: "θ-shift of the dilated profile wraps around the box".into(),
            });
        }
    }

    // E(x) = Σ_q vol·ω(q) f(x + sθq/2) e^{iq·x}
    let reference = crate::symbol::sample_into(f, grid, &mut warnings)?;
    let field: Vec<CNum<T>> = match f {
        Symbol::Gaussian(_) | Symbol::Polynomial(_) => {
            let nodes: Vec<Vec<T>> = (0..grid.len()).map(|i| grid.node(i)).collect();
            nodes
                .par_iter()
                .map(|x| {
                    let mut acc = re(T::zero());
                    for flat in 0..total_nodes {
                        let q = qvec_of(flat);
                        let w = omega_vals[flat];
                        if w.norm() == T::zero() {
                            continue;
                        }
                        let sh = theta.times(&q);
                        let xs: Vec<T> = x
                            .iter()
                            .zip(&sh)
                            .map(|(&xv, &sv)| xv + shift_sign * half * sv)
                            .collect();
                        let fv = match f {
                            Symbol::Gaussian(g) => g.eval(&xs),
                            Symbol::Polynomial(p) => p.eval(&xs),
                            Symbol::Grid(_) => unreachable!(),
                        };
                        let phase: T = q.iter().zip(x).map(|(&a, &b)| a * b).sum();
                        acc = acc + w * fv * CNum::from_polar(T::one(), phase);
                    }
                    acc * re(vol)
                })
                .collect()
        }
        Symbol::Grid(_) => {
            let fft = CenteredFft::new(grid);
            let fhat = fft.forward(reference.values());
            let len = grid.len();
            let partials: Vec<Vec<CNum<T>>> = (0..total_nodes)
                .collect::<Vec<_>>()
                .par_chunks(total_nodes.div_ceil(64).max(1))
                .map(|chunk| {
                    let mut ws = fft.make_workspace();
                    let mut buf = vec![re(T::zero()); len];
                    let mut out = vec![re(T::zero()); len];
                    for &flat in chunk {
                        let w = omega_vals[flat];
                        if w.norm() == T::zero() {
                            continue;
                        }
                        let q = qvec_of(flat);
                        let sh: Vec<T> = theta
                            .times(&q)
                            .into_iter()
                            .map(|v| -shift_sign * half * v)
                            .collect();
                        buf.copy_from_slice(&fhat);
                        let tables = fft.shift_tables(&sh);
                        fft.multiply_separable(&mut buf, &tables);
                        fft.inverse_mut(&mut buf, &mut ws);
                        for (i, (o, &bv)) in out.iter_mut().zip(&buf).enumerate() {
                            let x = grid.node(i);
                            let phase: T = q.iter().zip(&x).map(|(&a, &b)| a * b).sum();
                            *o = *o + w * re(vol) * bv * CNum::from_polar(T::one(), phase);
                        }
                    }
                    out
                })
                .collect();
            let mut out = vec![re(T::zero()); len];
            for part in &partials {
                for (o, &p) in out.iter_mut().zip(part) {
                    *o = *o + p;
                }
            }
            out
        }
    };

    let err = field
        .iter()
        .zip(reference.values())
        .map(|(a, b)| (a - b).norm())
        .fold(T::zero(), T::max);
    if !err.is_finite() {
        return Err(MoyalError::Numerical("NaN in approximation-of-identity field".into()));
    }
    Ok(Flagged::with(ApproxIdentityError { err, omega_check }, warnings))
}

// --- JSON tagged-union serialization ---

pub fn functional_to_json<T: Scalar>(u: &Functional<T>) -> Result<serde_json::Value> {
    Ok(match u {
        Functional::Delta { xi } => serde_json::json!({
            "type": "delta",
            "xi": xi.iter().map(|v| v.to_f64().unwrap()).collect::<Vec<_>>(),
        }),
        Functional::PlaneWave { k } => serde_json::json!({
            "type": "plane_wave",
            "k": k.iter().map(|v| v.to_f64().unwrap()).collect::<Vec<_>>(),
        }),
        Functional::One { d } => serde_json::json!({ "type": "one", "d": d }),
        Functional::PolyGaussianDensity(pg) => serde_json::json!({
            "type": "poly_gaussian",
            "poly": symbol_to_json(&Symbol::Polynomial(pg.poly.clone()))?,
            "gaussian": symbol_to_json(&Symbol::Gaussian(pg.gauss.clone()))?,
        }),
    })
}

pub fn functional_from_json<T: Scalar>(v: &serde_json::Value) -> Result<Functional<T>> {
    let ty = v
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or_else(|| MoyalError::Config("functional needs a \"type\" field".into()))?;
    let real_vec = |key: &str| -> Result<Vec<T>> {
        v.get(key)
            .and_then(|a| a.as_array())
            .ok_or_else(|| MoyalError::Config(format!("functional needs \"{key}\"")))?
            .iter()
            .map(|x| {
                x.as_f64()
                    .and_then(T::from_f64)
                    .ok_or_else(|| MoyalError::Config("bad number".into()))
            })
            .collect()
    };
    match ty {
        "delta" => Ok(Functional::Delta { xi: real_vec("xi")? }),
        "plane_wave" => Ok(Functional::PlaneWave { k: real_vec("k")? }),
        "one" => {
            let d = v
                .get("d")
                .and_then(|x| x.as_u64())
                .ok_or_else(|| MoyalError::Config("\"one\" needs \"d\"".into()))?;
            Ok(Functional::One { d: d as usize })
        }
        "poly_gaussian" => {
            let poly = symbol_from_json::<T>(
                v.get("poly").ok_or_else(|| MoyalError::Config("needs \"poly\"".into()))?,
            )?;
            let gauss = symbol_from_json::<T>(
                v.get("gaussian")
                    .ok_or_else(|| MoyalError::Config("needs \"gaussian\"".into()))?,
            )?;
            match (poly, gauss) {
                (Symbol::Polynomial(p), Symbol::Gaussian(g)) => {
                    Ok(Functional::PolyGaussianDensity(PolyGauss::new(p, g)))
                }
                _ => Err(MoyalError::Config("poly_gaussian parts have wrong types".into())),
            }
        }
        other => Err(MoyalError::Config(format!("unknown functional type \"{other}\""))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::MultiIndex;
    use num_complex::Complex64 as C64;

    #[test]
    fn delta_pairing_is_evaluation() {
        let g = Gaussian::<f64>::isotropic(1, 1.0).unwrap();
        let u = Functional::Delta { xi: vec![0.0] };
        let v = pair(&u, &Symbol::Gaussian(g.clone())).unwrap().value;
        assert_eq!(v, C64::new(1.0, 0.0));
        let u2 = Functional::Delta { xi: vec![0.7] };
        let v2 = pair(&u2, &Symbol::Gaussian(g)).unwrap().value;
        assert!((v2.re - (-0.49f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn one_pairing_is_integral() {
        // ⟨𝟙, e^{−x²}⟩ = √π in d=1
        let g = Gaussian::<f64>::isotropic(1, 1.0).unwrap();
        let u = Functional::One { d: 1 };
        let v = pair(&u, &Symbol::Gaussian(g)).unwrap().value;
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn plane_wave_pairing_is_fourier_value() {
        let g = Gaussian::<f64>::offset_isotropic(2, 0.8, &[0.3, -0.1]).unwrap();
        let k = vec![0.9, -0.4];
        let u = Functional::PlaneWave { k: k.clone() };
        let direct = pair(&u, &Symbol::Gaussian(g.clone())).unwrap().value;
        let hat = g.fourier_forward().unwrap();
        let want = hat.eval(&[-k[0], -k[1]]);
        assert!((direct - want).norm() < 1e-13);
    }

    #[test]
    fn pairing_linearity() {
        let u = Functional::PolyGaussianDensity(PolyGauss::new(
            Polynomial::coordinate(1, 0),
            Gaussian::offset_isotropic(1, 0.6, &[0.2]).unwrap(),
        ));
        let f = Symbol::Gaussian(Gaussian::isotropic(1, 1.0).unwrap());
        let g = Symbol::Gaussian(Gaussian::offset_isotropic(1, 0.9, &[0.5]).unwrap());
        let a = C64::new(1.3, -0.4);
        let b = C64::new(-0.2, 0.9);
        // closed form on each; linear combination checked on a grid
        let grid = PhaseGrid::new(1, 10.0, 64).unwrap();
        let fs = crate::symbol::sample(&f, &grid).unwrap().symbol;
        let gs = crate::symbol::sample(&g, &grid).unwrap().symbol;
        let combo = Symbol::Grid(fs.scale(a).add(&gs.scale(b)).unwrap());
        let lhs = pair(&u, &combo).unwrap().value;
        let rhs = a * pair(&u, &f).unwrap().value + b * pair(&u, &g).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn one_star_pairing_is_plain_integral() {
        // ⟨𝟙⋆f, g⟩ = ∫ fg dx
        let th = ThetaMatrix::canonical(2, 1.0).unwrap();
        let f = Gaussian::<f64>::isotropic(2, 1.0).unwrap();
        let g = Gaussian::<f64>::offset_isotropic(2, 0.8, &[0.4, 0.2]).unwrap();
        let u = Functional::One { d: 2 };
        let left = star_functional(&u, &f, &th, Side::Left, &g).unwrap();
        let right = star_functional(&u, &f, &th, Side::Right, &g).unwrap();
        let want = f.product(&g).unwrap().integral().unwrap();
        assert!((left - want).norm() / want.norm() < 1e-12);
        assert!((right - want).norm() / want.norm() < 1e-12);
    }

    #[test]
    fn delta_star_at_theta_zero() {
        // θ = 0: ⟨δ₀⋆f, g⟩ = f(0)g(0)
        let th = ThetaMatrix::zero(2).unwrap();
        let f = Gaussian::<f64>::offset_isotropic(2, 1.0, &[0.3, 0.0]).unwrap();
        let g = Gaussian::<f64>::offset_isotropic(2, 0.7, &[-0.2, 0.4]).unwrap();
        let u = Functional::Delta { xi: vec![0.0, 0.0] };
        let got = star_functional(&u, &f, &th, Side::Left, &g).unwrap();
        let origin = [0.0, 0.0];
        let want = f.eval(&origin) * g.eval(&origin);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn twisted_conv_delta_is_shift_with_phase() {
        // (δ_ξ ★̂ g)(q) = g(q−ξ) e^{(i/2)qθξ}
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let th = ThetaMatrix::canonical(2, 1.0).unwrap();
        let g = Gaussian::<f64>::isotropic(2, 0.8).unwrap();
        let xi = vec![0.5, -0.25];
        let v = Functional::Delta { xi: xi.clone() };
        let out = twisted_conv_functional(&v, &Symbol::Gaussian(g.clone()), &th, Side::Left, &grid)
            .unwrap()
            .value;
        for i in (0..grid.len()).step_by(71) {
            let q = grid.node(i);
            let shifted = [q[0] - xi[0], q[1] - xi[1]];
            let phase = 0.5 * th.form(&q, &xi);
            let want = g.eval(&shifted) * C64::from_polar(1.0, phase);
            assert!((out.values()[i] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn twisted_conv_delta_zero_is_identity() {
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let th = ThetaMatrix::canonical(2, 1.0).unwrap();
        let g = Gaussian::<f64>::offset_isotropic(2, 0.9, &[0.2, 0.1]).unwrap();
        let v = Functional::Delta { xi: vec![0.0, 0.0] };
        let out = twisted_conv_functional(&v, &Symbol::Gaussian(g.clone()), &th, Side::Left, &grid)
            .unwrap()
            .value;
        let want = crate::symbol::sample(&Symbol::Gaussian(g), &grid).unwrap().symbol;
        assert!(out.sup_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn involution_is_involutive_and_matches_pairing_rule() {
        let u = Functional::PlaneWave { k: vec![0.7, -0.3] };
        let uu = involute(&involute(&u));
        let f = Symbol::Gaussian(Gaussian::<f64>::offset_isotropic(2, 1.1, &[0.2, 0.0]).unwrap());
        let a = pair(&u, &f).unwrap().value;
        let b = pair(&uu, &f).unwrap().value;
        assert!((a - b).norm() < 1e-14);
        // ⟨u*, f⟩ = conj ⟨u, f*⟩ for each variant
        for u in [
            Functional::Delta { xi: vec![0.4, -0.6] },
            Functional::PlaneWave { k: vec![1.2, 0.5] },
            Functional::One { d: 2 },
            Functional::PolyGaussianDensity(PolyGauss::new(
                {
                    let mut p = Polynomial::zero(2);
                    p.set(MultiIndex(vec![1, 1]), C64::new(0.3, 0.8));
                    p.set(MultiIndex(vec![0, 0]), C64::new(1.0, 0.0));
                    p
                },
                Gaussian::offset_isotropic(2, 0.7, &[0.1, 0.3]).unwrap(),
            )),
        ] {
            let lhs = pair(&involute(&u), &f).unwrap().value;
            let rhs = pair(&u, &f.conj()).unwrap().value.conj();
            assert!((lhs - rhs).norm() < 1e-12, "variant {u:?}");
        }
    }

    #[test]
    fn approx_identity_theta_zero_oracle() {
        // at θ = 0 the deviation is exactly ‖f·(e_ν − 1)‖∞
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let th = ThetaMatrix::zero(2).unwrap();
        let f = Symbol::Gaussian(Gaussian::isotropic(2, 1.0).unwrap());
        let e = Symbol::Gaussian(Gaussian::isotropic(2, 1.0).unwrap());
        let nu = 4;
        let r = approx_identity_error(&f, &e, nu, &th, Side::Right, &grid).unwrap().value;
        // oracle: max over nodes of |f(x)(e(x/ν) − 1)|
        let mut want = 0.0f64;
        for i in 0..grid.len() {
            let x = grid.node(i);
            let ev = (-(x[0] * x[0] + x[1] * x[1]) / (nu * nu) as f64).exp();
            let fv = (-(x[0] * x[0] + x[1] * x[1])).exp();
            want = want.max(fv * (ev - 1.0).abs());
        }
        assert!(r.omega_check < 1e-12, "omega: {:.3e}", r.omega_check);
        assert!(
            (r.err - want).abs() < 1e-10,
            "θ=0 oracle: got {:.6e}, want {:.6e}",
            r.err,
            want
        );
    }

    #[test]
    fn approx_identity_error_decays() {
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let th = ThetaMatrix::canonical(2, 1.0).unwrap();
        let f = Symbol::Gaussian(Gaussian::isotropic(2, 1.0).unwrap());
        // asymmetric profile with e(0) = 1
        let e = Symbol::Gaussian(
            Gaussian::isotropic(2, 1.0).unwrap().modulate(&[0.0, 0.0]).unwrap(),
        );
        let mut prev = f64::INFINITY;
        for nu in [2u32, 4, 8] {
            let r = approx_identity_error(&f, &e, nu, &th, Side::Right, &grid).unwrap().value;
            assert!(r.omega_check < 1e-12);
            assert!(r.err < prev, "err must decrease: {} at ν={nu}", r.err);
            prev = r.err;
        }
    }

    #[test]
    fn approx_identity_rejects_bad_normalization() {
        let grid = PhaseGrid::new(2, 8.0, 32).unwrap();
        let th = ThetaMatrix::canonical(2, 1.0).unwrap();
        let f = Symbol::Gaussian(Gaussian::isotropic(2, 1.0).unwrap());
        let bad = Symbol::Gaussian(
            Gaussian::isotropic(2, 1.0).unwrap().scale_log(C64::new(0.1, 0.0)),
        );
        assert!(matches!(
            approx_identity_error(&f, &bad, 4, &th, Side::Right, &grid),
            Err(MoyalError::Normalization { .. })
        ));
    }

    #[test]
    fn functional_json_roundtrip() {
        let us = [
            Functional::Delta { xi: vec![0.5, -1.0] },
            Functional::PlaneWave { k: vec![2.0, 0.0] },
            Functional::One { d: 2 },
            Functional::PolyGaussianDensity(PolyGauss::new(
                Polynomial::coordinate(2, 1),
                Gaussian::<f64>::isotropic(2, 0.5).unwrap(),
            )),
        ];
        let probe = Symbol::Gaussian(Gaussian::<f64>::offset_isotropic(2, 0.9, &[0.1, 0.7]).unwrap());
        for u in us {
            let j = functional_to_json(&u).unwrap();
            let back = functional_from_json::<f64>(&j).unwrap();
            let a = pair(&u, &probe).unwrap().value;
            let b = pair(&back, &probe).unwrap().value;
            assert!((a - b).norm() < 1e-14, "roundtrip changed {u:?}");
        }
    }
}
