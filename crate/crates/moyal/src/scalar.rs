//! Floating-point scalar abstraction: the whole crate is generic over `f32`/`f64`.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Real scalar type usable throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + rustfft::FftNum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// Lift a `usize` into the scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Tolerance for "exact to rounding" checks: the given `f64` bound,
    /// floored at a multiple of the type's epsilon so f32 instantiations
    /// remain usable.
    fn exact_tol(bound: f64) -> Self {
        let floor = Self::epsilon() * Self::of(64.0);
        Self::of(bound).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the crate scalar.
pub type CNum<T> = Complex<T>;

/// i as a complex constant.
pub fn im<T: Scalar>() -> CNum<T> {
    Complex::new(T::zero(), T::one())
}

/// Real constant as a complex number.
pub fn re<T: Scalar>(x: T) -> CNum<T> {
    Complex::new(x, T::zero())
}
