//! Moyal star products of phase-space symbols.
//!
//! The star product f ⋆_θ g generated by a real antisymmetric matrix θ is
//! computed in three equivalent representations:
//!
//! * a bidifferential power series (exact on polynomials, spectral on grids),
//! * the oscillatory-integral form (2π)^{−d} ∫ f(x − θq/2) ĝ(q) e^{iq·x} dq,
//! * a twisted convolution at the bridge matrix −4θ⁻¹ after a symplectic
//!   Fourier transform.
//!
//! On top of the products themselves the crate estimates weighted
//! Gevrey-type norms of symbols, extends the product by duality to
//! distribution-like functionals with exact pairing rules, and checks the
//! quantitative identities tying the representations together (tracial
//! property, convolution bridge, approximation of identity).
//!
//! Everything is generic over the floating-point scalar; the `*64` aliases
//! at the crate root fix `f64`.

pub mod duality;
pub mod error;
pub mod fft;
pub mod gaussian;
pub mod gausspoly;
pub mod grid;
pub mod gsanalysis;
pub mod linalg;
pub mod multi_index;
pub mod poly;
pub mod scalar;
pub mod spectral;
pub mod starproduct;
pub mod symbol;
pub mod theta;

pub use error::{Flagged, GridWarning, MoyalError, Result};
pub use multi_index::MultiIndex;
pub use scalar::{CNum, Scalar};

/// f64 instantiations of the core types.
pub type Theta64 = theta::ThetaMatrix<f64>;
pub type Grid64 = grid::PhaseGrid<f64>;
pub type Symbol64 = symbol::Symbol<f64>;
pub type GridSymbol64 = symbol::GridSymbol<f64>;
pub type Polynomial64 = poly::Polynomial<f64>;
pub type Gaussian64 = gaussian::Gaussian<f64>;
pub type C64 = num_complex::Complex64;
