//! Entry types for operator matrices: exact rationals or floats.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field operations needed to assemble and multiply operators.
///
/// `TOLERANCE` is the absolute threshold below which a value counts as zero:
/// exactly zero for rationals, `1e-10` for floats.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const TOLERANCE: f64;
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    fn is_negligible(&self) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_f64().abs() <= Self::TOLERANCE
        }
    }

    /// `|self - other|` as a float.
    fn deviation(&self, other: &Self) -> f64 {
        (self.clone() - other.clone()).to_f64().abs()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }
}

impl Scalar for f64 {
    const TOLERANCE: f64 = 1e-10;
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational64 {
    const TOLERANCE: f64 = 0.0;
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn deviation(&self, other: &Self) -> f64 {
        Scalar::to_f64(&(self - other).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_negligibility_is_strict() {
        let tiny = Rational64::new(1, 1 << 60);
        assert!(!tiny.is_negligible());
        assert!(Rational64::zero().is_negligible());
        assert!(1e-12_f64.is_negligible());
        assert!(!1e-8_f64.is_negligible());
        assert_eq!(Rational64::new(3, 2).deviation(&Rational64::new(1, 2)), 1.0);
    }
}
