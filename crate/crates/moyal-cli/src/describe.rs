//! Static documentation of the formulas implemented and the conventions in
//! force.

use moyal::error::{MoyalError, Result};

pub const TOPICS: &[(&str, &str)] = &[
    (
        "star-series",
        "Power-series star product:\n\
         (f ⋆_θ g)(x) = Σ_{n≥0} (i/2)^n/n! · (∂_{x^i} θ^{ij} ∂_{y^j})^n f(x) g(y) |_{y=x}\n\
         Exact and terminating for polynomial×polynomial (at order min(deg f, deg g));\n\
         spectral derivatives for grid×grid, capped at order N/4.",
    ),
    (
        "star-integral",
        "Integral-representation star product, evaluated as\n\
         (f ⋆_θ g)(x) = (2π)^{-d} ∫ f(x − θq/2) ĝ(q) e^{iq·x} dq\n\
         by trapezoid quadrature over the dual grid, with f(· − θq/2) obtained by\n\
         exact Fourier shift of the band-limited interpolant. For invertible θ it\n\
         agrees with the double-integral form\n\
         (f ⋆_θ g)(x) = (π^d det θ)^{-1} ∬ f(x+y) g(x+z) e^{-2i y·θ⁻¹z} dy dz,\n\
         which is kept as a small-grid test oracle. Polynomial operands are\n\
         multiplied by a Gaussian window and flagged; the result is then the\n\
         product of the windowed symbols.",
    ),
    (
        "twisted",
        "Twisted convolution:\n\
         (F ★̂_θ G)(q) = ∫ F(p) G(q−p) e^{(i/2) q·θp} dp\n\
         computed by direct quadrature with separable phase tables. It is the\n\
         Fourier image of the star product: F(f ⋆_θ g) = (2π)^{-d} (Ff) ★̂_θ (Fg),\n\
         and reduces to the ordinary convolution at θ = 0. The Dirac δ is its\n\
         identity.",
    ),
    (
        "bridge",
        "Twisted-convolution bridge at the matrix −4θ⁻¹ (θ invertible):\n\
         u ⋆_θ g = (π^d det θ)^{-1} · u ★̂_{−4θ⁻¹} (F_θ g)\n\
         g ⋆_θ u = (π^d det θ)^{-1} · (F̄_θ g) ★̂_{−4θ⁻¹} u\n\
         with F_θ, F̄_θ the symplectic transforms. Functionals enter through their\n\
         exact pairing rule (v ★̂ g)(q) = ⟨v, g(q−·) e^{±(i/2) q·θ(·)}⟩.",
    ),
    (
        "symplectic",
        "Symplectic Fourier transforms:\n\
         (F_θ g)(ξ) = ∫ g(x) e^{−2i x·θ⁻¹ξ} dx,   (F̄_θ f)(ξ) = ∫ f(x) e^{+2i x·θ⁻¹ξ} dx\n\
         Applying F_θ twice scales by π^d det θ; F̄_θ F_θ adds a reflection, so it\n\
         equals π^d det θ on even symbols. Gaussians map exactly; grids use direct\n\
         quadrature and flag outputs beyond the Nyquist band.",
    ),
    (
        "gs-norm",
        "Weighted Gevrey norm estimate:\n\
         sup_{x, |n| ≤ n_max} |∂^n f(x)| · e^{±|x/A|^{1/α}} / (B^{|n|} n^{βn})\n\
         with the uniform norm |x| = max_j |x_j|, multi-index powers\n\
         n^{βn} = Π n_j^{β n_j} and the 0⁰ = 1 convention. weight_sign +1 is the\n\
         test-function norm, −1 the multiplier norm. The sup over derivative\n\
         orders is truncated at n_max; the `saturated` flag reports estimates\n\
         that were still growing at the last order.",
    ),
    (
        "decay-norm",
        "Polynomial-weight decay norm:\n\
         sup_{x, |n| ≤ n_max} (1+|x|)^N |∂^n f(x)| / (B^{|n|} n^{n/2}).",
    ),
    (
        "approx-id",
        "Dilation approximation of the identity: e_ν(x) = e(x/ν) with e(0) = 1.\n\
         (f ⋆ e_ν)(x) = ∫ ω_ν(q) f(x − θq/2) e^{iq·x} dq,  ω_ν(q) = (ν/2π)^d ê(νq),\n\
         evaluated on a quadrature box adapted to the dilation; ∫ω_ν = e(0) = 1 is\n\
         verified at every ν. The sup-norm error decays like 1/ν for asymmetric\n\
         profiles (even profiles superconverge at 1/ν²).",
    ),
    (
        "series-tail",
        "Absolute-convergence regime of the power series: coefficient data are\n\
         fitted against |c_n| ≤ C (b/n)^{n/2} (entire of order ≤ 2, finite type),\n\
         term norms must decay geometrically with ratio ≤ B√(2b), and the\n\
         truncation order M is the smallest with tail C·q^{M+1}/(1−q) ≤ tol,\n\
         q = B√(2b) < 1.",
    ),
    (
        "trace",
        "Tracial property: ∫ (f ⋆_θ g)(x) dx = ∫ f(x) g(x) dx for integrable\n\
         symbols — the hinge of the duality extension ⟨u⋆f, g⟩ = ⟨u, f⋆g⟩.",
    ),
    (
        "conventions",
        "Conventions in force:\n\
         Fourier: forward f̂(p) = ∫ f(x) e^{−ip·x} dx (no prefactor), inverse\n\
         carries (2π)^{-d}; all 2π bookkeeping lives in the spectral module.\n\
         Multi-index powers: n^{βn} = Π_j n_j^{β n_j} with 0⁰ = 1.\n\
         Coordinate norm: uniform, |x| = max_j |x_j|.\n\
         Grids: x_m = −L + mΔ, Δ = 2L/N, N a power of two; dual spacing π/L.\n\
         Grid symbols are periodic band-limited interpolants; off-grid\n\
         evaluation is exact Fourier-shift interpolation.",
    ),
];

pub fn describe(topic: &str) -> Result<&'static str> {
    TOPICS
        .iter()
        .find(|(name, _)| *name == topic)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = TOPICS.iter().map(|(n, _)| *n).collect();
            MoyalError::Usage(format!(
                "unknown topic \"{topic}\"; available: {}",
                names.join(", ")
            ))
        })
}
