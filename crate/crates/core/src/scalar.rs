//! Scalar abstraction: every solver in this crate is generic over the real
//! field, with complex arithmetic layered on top of it.

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

pub use nalgebra::Complex;

/// Real scalar type the crate is generic over (`f32` or `f64` in practice).
///
/// `RealField` supplies the field operations and elementary functions,
/// `FromPrimitive`/`ToPrimitive` the conversions to and from `f64` used for
/// configuration constants and serialization.
pub trait Real: RealField + FromPrimitive + ToPrimitive + Copy + Default {}

impl<T> Real for T where T: RealField + FromPrimitive + ToPrimitive + Copy + Default {}

/// Dense complex matrix over the real scalar `T`.
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex vector over the real scalar `T`.
pub type CVector<T> = DVector<Complex<T>>;
/// Dense real matrix.
pub type RMatrix<T> = DMatrix<T>;
/// Dense real vector.
pub type RVector<T> = DVector<T>;

/// Converts an `f64` constant into the generic scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Converts the generic scalar to `f64` (for reports and serialization).
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar not representable as f64")
}

/// Complex value with the given real part and zero imaginary part.
#[inline]
pub fn cre<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// A tolerance that honors an `f64`-calibrated threshold but never drops
/// below a few ulps of the working precision (relevant when `T = f32`).
#[inline]
pub fn precision_floor<T: Real>(tol: f64) -> T {
    real::<T>(tol).max(T::default_epsilon() * real::<T>(32.0))
}
