//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! with `|lo| <= ulp(hi)/2`, giving roughly 31 significant decimal digits.
//!
//! Used by the wide-accumulator evaluation path of the conic function, where
//! the two regular solutions grow like `e^z` while their bounded combination
//! stays O(1).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: 3.141592653589793,
        lo: 1.2246467991473532e-16,
    };
    pub const LN2: Self = Self {
        hi: 0.6931471805599453,
        lo: 2.3190468138462996e-17,
    };
    /// 2^-104, the unit roundoff of the format.
    pub const EPSILON: f64 = 4.930380657631324e-32;

    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// `num / den`, correctly rounded to double-double.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_f64(num as f64) / Self::from_f64(den as f64)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Multiply by an exact power of two.
    pub fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let q = self.hi.sqrt();
        let r = self - Self::from_f64(q) * Self::from_f64(q);
        let (hi, lo) = quick_two_sum(q, r.hi / (2.0 * q));
        Self { hi, lo }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if n < 0 {
            Self::ONE / acc
        } else {
            acc
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / Self::LN2.hi).round();
        let r = (self - Self::LN2 * Self::from_f64(k)).ldexp(-10);

        // Taylor series of expm1(r) with |r| < 3.4e-4.
        let mut term = r;
        let mut sum = r;
        for n in 2..30 {
            term = term * r / Self::from_f64(n as f64);
            sum += term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs() {
                break;
            }
        }
        // (1 + s)^2 - 1 = 2s + s^2, applied ten times undoes the 2^-10 scaling.
        for _ in 0..10 {
            sum = sum.ldexp(1) + sum.sqr();
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0);
        let mut y = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * Self::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Self::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: DoubleDouble, b: DoubleDouble) -> f64 {
        ((a - b).abs() / b.abs()).to_f64()
    }

    #[test]
    fn third_times_three_is_one() {
        let third = DoubleDouble::from_ratio(1, 3);
        let one = third * DoubleDouble::from_f64(3.0);
        assert!(rel(one, DoubleDouble::ONE) < 1e-31);
    }

    #[test]
    fn exp_of_one_matches_e() {
        // e to 32 digits
        let e = DoubleDouble::new(2.718281828459045, 1.4456468917292502e-16);
        assert!(rel(DoubleDouble::ONE.exp(), e) < 1e-30);
    }

    #[test]
    fn exp_ln_round_trip() {
        for &(n, d) in &[(1, 100_000), (3, 10), (1, 1), (6, 1), (24_690, 20), (7, 3)] {
            let x = DoubleDouble::from_ratio(n, d);
            assert!(rel(x.ln().exp(), x) < 1e-29, "x = {x}");
        }
    }

    #[test]
    fn ln_two_is_constant() {
        let two = DoubleDouble::from_f64(2.0);
        assert!(rel(two.ln(), DoubleDouble::LN2) < 1e-31);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = DoubleDouble::from_ratio(2, 3);
        assert!(rel(x.sqrt().sqr(), x) < 1e-31);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = DoubleDouble::from_ratio(7, 6);
        let mut p = DoubleDouble::ONE;
        for _ in 0..13 {
            p *= x;
        }
        assert!(rel(x.powi(13), p) < 1e-30);
        assert!(rel(x.powi(-3) * x.powi(3), DoubleDouble::ONE) < 1e-31);
    }
}
