//! Scalar abstraction: everything downstream is generic over the float type.

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};
use std::str::FromStr;

/// Floating scalar used by the lattice code.
///
/// Beyond the usual `num_traits` float surface this adds the error function,
/// which the Gaussian module needs for exact per-cell masses.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumCast
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Display
    + Debug
    + LowerExp
    + FromStr
    + Send
    + Sync
    + 'static
{
    fn erf(self) -> Self;
    fn erfc(self) -> Self;
}

impl Scalar for f64 {
    fn erf(self) -> Self {
        libm::erf(self)
    }
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Scalar for f32 {
    fn erf(self) -> Self {
        libm::erf(self as f64) as f32
    }
    fn erfc(self) -> Self {
        libm::erfc(self as f64) as f32
    }
}

/// Embed an `f64` literal into the scalar type.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal must be representable")
}

/// h^d for small integer d.
#[inline]
pub fn powi<T: Scalar>(x: T, d: usize) -> T {
    let mut out = T::one();
    for _ in 0..d {
        out = out * x;
    }
    out
}

/// Volume of the unit Euclidean ball in dimension d (1, 2 or 3).
pub fn unit_ball_volume<T: Scalar>(d: usize) -> T {
    match d {
        1 => lit(2.0),
        2 => T::PI(),
        3 => lit::<T>(4.0) * T::PI() / lit(3.0),
        _ => panic!("unsupported dimension {d}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_basic_values() {
        assert!((1.0f64.erf() - 0.8427007929497149).abs() < 1e-15);
        assert!((0.0f64.erf()).abs() == 0.0);
        assert!((2.0f64.erfc() - 0.004677734981047265).abs() < 1e-15);
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume::<f64>(1), 2.0);
        assert_eq!(unit_ball_volume::<f64>(2), std::f64::consts::PI);
        assert!((unit_ball_volume::<f64>(3) - 4.188790204786391).abs() < 1e-15);
    }

    #[test]
    fn f32_erf_is_consistent() {
        let a: f32 = 0.7;
        assert!((a.erf() as f64 - (0.7f64).erf()).abs() < 1e-6);
    }
}
