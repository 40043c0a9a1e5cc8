//! Real scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point type the simulator can run on: `f32` or `f64`.
///
/// The thresholds carried here are the per-precision versions of the
/// cutoffs used throughout the crate (coefficient pruning, norm checks).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Pauli coefficients with modulus below this are dropped on canonicalization.
    const PRUNE: Self;
    /// Tolerance for "is this state normalized / this matrix Hermitian" checks.
    const NORM_TOL: Self;

    /// Lossless-enough conversion from an `f64` literal.
    fn lit(v: f64) -> Self;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const PRUNE: f64 = 1e-14;
    const NORM_TOL: f64 = 1e-10;

    #[inline]
    fn lit(v: f64) -> Self {
        v
    }
}

impl Real for f32 {
    const PRUNE: f32 = 1e-7;
    const NORM_TOL: f32 = 1e-4;

    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }
}

/// Complex amplitude over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `i^k` for `k` taken mod 4.
#[inline]
pub(crate) fn i_pow<T: Real>(k: u32) -> C<T> {
    match k % 4 {
        0 => c(T::one(), T::zero()),
        1 => c(T::zero(), T::one()),
        2 => c(-T::one(), T::zero()),
        _ => c(T::zero(), -T::one()),
    }
}
