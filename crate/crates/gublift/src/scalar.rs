//! Numeric abstraction shared by the floating-point and exact-rational paths.
//!
//! Cut coefficients, oracle values, and certificates are computed by the same
//! generic kernels over either `f64` or [`Rat`]. The rational path is used by
//! tests on piecewise-linear instances where results must match with zero
//! tolerance.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact rational scalar. `i128` components are ample for the desk-scale
/// data the exact path sees (small integer coefficients, dyadic points).
pub type Rat = Ratio<i128>;

pub trait Scalar:
    Clone
    + PartialOrd
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn from_int(v: i64) -> Self {
        Rat::from_integer(v as i128)
    }
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Exact rational value of a finite `f64`. Every finite double is a dyadic
/// rational; this decomposes the bit pattern rather than approximating.
///
/// Panics if the value is not finite or needs more than 127 bits (subnormals
/// and astronomically scaled values, which the exact path never produces).
pub fn rat_from_f64(x: f64) -> Rat {
    assert!(x.is_finite(), "cannot convert {x} to a rational");
    if x == 0.0 {
        return Rat::zero();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i128 } else { 1i128 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mantissa, exp) = if exp_bits == 0 {
        (frac, -1074i64)
    } else {
        (frac + (1i128 << 52), exp_bits - 1075)
    };
    let value = sign * mantissa;
    if exp >= 0 {
        assert!(exp < 70, "f64 {x} too large for exact conversion");
        Rat::from_integer(value << exp)
    } else {
        assert!(exp > -120, "f64 {x} too small for exact conversion");
        Rat::new(value, 1i128 << (-exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_float_conversion() {
        assert_eq!(rat_from_f64(0.5), Rat::new(1, 2));
        assert_eq!(rat_from_f64(-3.0), Rat::from_integer(-3));
        assert_eq!(rat_from_f64(0.1), Rat::new(3602879701896397, 1 << 55));
        assert_eq!(rat_from_f64(0.0), Rat::zero());
    }

    #[test]
    fn roundtrip_through_f64() {
        for v in [1.25, -7.75, 1024.0, 0.015625] {
            assert_eq!(rat_from_f64(v).to_f64(), v);
        }
    }
}
