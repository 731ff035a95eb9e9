//! Numeric backend abstraction.
//!
//! All metric computations are generic over [`Scalar`]. Two backends ship:
//!
//! - `f64`, with a global comparison tolerance of `1e-9`, and
//! - [`Rational`] (arbitrary-precision `num_rational::BigRational`), which is
//!   exact: its tolerance is zero and every comparison is decisive.
//!
//! Oracle-equality tests run on the rational backend so that "equal" means
//! bit-exact equality of reduced fractions.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used by the oracle paths and the `rational` backend.
pub type Rational = BigRational;

/// A totally ordered field element the metric kernels can compute with.
///
/// `f64` values flowing through this crate are validated finite on input, so
/// `cmp_total` treats NaN as a logic error and panics.
pub trait Scalar:
    Sized
    + Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    /// True for backends where comparisons are exact (zero tolerance).
    const EXACT: bool;

    /// Global comparison tolerance: zero for exact backends, `1e-9` for `f64`.
    fn tol() -> Self;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact conversion from an `f64` (every finite float is rational).
    fn from_f64_exact(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    fn cmp_total(&self, other: &Self) -> Ordering;

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }

    fn max_val(self, other: Self) -> Self {
        if self.cmp_total(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    fn min_val(self, other: Self) -> Self {
        if self.cmp_total(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// `a <= b` up to the backend tolerance.
    fn le_tol(&self, other: &Self) -> bool {
        self.cmp_total(&(other.clone() + Self::tol())) != Ordering::Greater
    }

    /// `|a - b|` within the backend tolerance.
    fn eq_tol(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs().cmp_total(&Self::tol()) != Ordering::Greater
    }

    /// Zero check up to the backend tolerance (used for pivot selection).
    fn is_zero_tol(&self) -> bool {
        self.abs().cmp_total(&Self::tol()) != Ordering::Greater
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tol() -> Self {
        1e-9
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64_exact(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other)
            .expect("non-finite value reached a comparison")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tol() -> Self {
        Rational::zero()
    }

    fn from_int(v: i64) -> Self {
        Rational::from_integer(v.into())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num.into(), den.into())
    }

    fn from_f64_exact(x: f64) -> Option<Self> {
        Rational::from_f64(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Falls back to a quotient of approximations for huge operands.
            self.numer().to_f64().unwrap_or(f64::INFINITY) / self.denom().to_f64().unwrap_or(1.0)
        })
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        Ord::cmp(self, other)
    }
}

/// Maximum of a nonempty iterator under the total order.
pub fn max_of<S: Scalar, I: IntoIterator<Item = S>>(iter: I) -> Option<S> {
    iter.into_iter().reduce(Scalar::max_val)
}

/// Minimum of a nonempty iterator under the total order.
pub fn min_of<S: Scalar, I: IntoIterator<Item = S>>(iter: I) -> Option<S> {
    iter.into_iter().reduce(Scalar::min_val)
}
