//! Floating-point abstraction shared by every numerical routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign, NumCast};
use rustfft::FftNum;

/// Real scalar usable as the component type of a [`crate::SpectralField`].
///
/// Implemented for `f32` and `f64`. Tolerances quoted in the documentation
/// assume `f64`; single precision is useful for cheap exploratory runs.
pub trait Real:
    Float
    + FloatConst
    + FftNum
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this type.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite constant")
    }

    /// Widens to `f64` for statistics and reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("representable")
    }

    /// Machine epsilon relative tolerance used for "exact" zero tests.
    fn tiny() -> Self;
}

impl Real for f32 {
    fn tiny() -> Self {
        1e-6
    }
}

impl Real for f64 {
    fn tiny() -> Self {
        1e-12
    }
}

/// Complex value with a [`Real`] component type.
pub type C<T> = Complex<T>;

#[cfg(test)]
#[inline]
pub(crate) fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

/// `e^{iθ}`.
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
