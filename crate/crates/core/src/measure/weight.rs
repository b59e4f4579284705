use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Weights below this are treated as zero (the "drop zero atoms" relation).
pub const ZERO_WEIGHT: f64 = 1e-12;
/// Allowed deviation of the total mass of a probability measure from 1.
pub const MASS_TOL: f64 = 1e-9;

/// Scalar type carried by the atoms of a measure.
///
/// `f64` is the working type; `Rational64` gives exact arithmetic for law
/// checks and fixed-point analysis.
pub trait Weight:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    /// Zero for the purposes of lowest terms.
    fn is_negligible(&self) -> bool;

    /// Strictly negative beyond rounding noise.
    fn is_negative_weight(&self) -> bool;

    /// Whether a total mass counts as 1.
    fn is_unit_mass(&self) -> bool;

    fn from_fraction(num: u64, den: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality of two weights at the atom-merging tolerance.
    fn close_to(&self, other: &Self) -> bool;
}

impl Weight for f64 {
    fn is_negligible(&self) -> bool {
        *self < ZERO_WEIGHT
    }

    fn is_negative_weight(&self) -> bool {
        *self < -ZERO_WEIGHT || self.is_nan()
    }

    fn is_unit_mass(&self) -> bool {
        (self - 1.0).abs() <= MASS_TOL
    }

    fn from_fraction(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn close_to(&self, other: &Self) -> bool {
        (self - other).abs() <= MASS_TOL
    }
}

impl Weight for Rational64 {
    fn is_negligible(&self) -> bool {
        !self.is_positive()
    }

    fn is_negative_weight(&self) -> bool {
        self.is_negative()
    }

    fn is_unit_mass(&self) -> bool {
        self.is_one()
    }

    fn from_fraction(num: u64, den: u64) -> Self {
        Rational64::new(num as i64, den as i64)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn close_to(&self, other: &Self) -> bool {
        self == other
    }
}
