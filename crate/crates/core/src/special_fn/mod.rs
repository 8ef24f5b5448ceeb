//! Scalar special functions: Γ, Pochhammer symbols and the ₀F₃ series.

mod gamma;
mod hyper;
pub mod wide;

pub use gamma::{gamma_fn, gamma_wide, pochhammer};
pub use hyper::{hyper0f3, hyper0f3_in, SeriesValue, DEFAULT_SERIES_TOL, MAX_SERIES_TERMS};
pub use wide::DoubleDouble;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Floating-point scalar used by the series evaluators: `f64` for the
/// standard path, [`DoubleDouble`] for the wide-accumulator path.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Unit roundoff.
    const EPSILON: f64;

    fn abs(self) -> Self;
    fn to_f64(self) -> f64;
    fn powi(self, n: i32) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Significant decimal digits carried by the format.
    fn digits() -> f64 {
        -Self::EPSILON.log10()
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON / 2.0;

    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = DoubleDouble::EPSILON;

    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        DoubleDouble::from_ratio(num, den)
    }
}

/// Neumaier's compensated accumulator.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<T: Real> {
    sum: T,
    comp: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::from(0.0),
            comp: T::from(0.0),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}
