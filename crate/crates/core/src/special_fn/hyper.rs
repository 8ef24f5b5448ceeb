use super::{CompensatedSum, Real};
use crate::error::{Error, Result};

pub const DEFAULT_SERIES_TOL: f64 = 1e-14;
pub const MAX_SERIES_TERMS: usize = 500;

/// A summed series together with its convergence diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue<T = f64> {
    pub value: T,
    pub terms_used: usize,
    /// Magnitude of the first neglected term.
    pub truncation_bound: f64,
    /// log10 of (largest partial sum / |value|); zero when no cancellation occurred.
    pub cancellation_digits: f64,
}

/// ₀F₃(;b₁,b₂,b₃;z) = Σ z^k / ((b₁)_k (b₂)_k (b₃)_k k!) in `f64`.
pub fn hyper0f3(b1: f64, b2: f64, b3: f64, z: f64, tol: f64) -> Result<SeriesValue> {
    hyper0f3_in([b1, b2, b3], z, tol)
}

/// ₀F₃ evaluated in any [`Real`] format. Summation stops once two consecutive
/// terms fall below `tol` relative to the partial sum.
pub fn hyper0f3_in<T: Real>(b: [T; 3], z: T, tol: f64) -> Result<SeriesValue<T>> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("series tolerance must be positive, got {tol}")));
    }
    for bi in b {
        let x = bi.to_f64();
        if x <= 0.0 && x == x.round() {
            return Err(Error::Domain(format!(
                "0F3 denominator parameter {x} is a non-positive integer"
            )));
        }
    }

    let mut acc = CompensatedSum::new();
    let mut term = T::from(1.0);
    acc.add(term);
    let mut max_partial = 1.0f64;
    let mut small_run = 0;

    for k in 0..MAX_SERIES_TERMS {
        let kk = T::from(k as f64);
        term = term * z / ((b[0] + kk) * (b[1] + kk) * (b[2] + kk) * (kk + T::from(1.0)));
        let sum = acc.value();
        if term.abs().to_f64() < tol * sum.abs().to_f64() {
            small_run += 1;
            if small_run == 2 {
                let value = acc.value();
                let magnitude = value.abs().to_f64();
                let cancellation_digits = if magnitude > 0.0 {
                    (max_partial / magnitude).log10().max(0.0)
                } else {
                    f64::INFINITY
                };
                return Ok(SeriesValue {
                    value,
                    terms_used: k + 1,
                    truncation_bound: term.abs().to_f64(),
                    cancellation_digits,
                });
            }
        } else {
            small_run = 0;
        }
        acc.add(term);
        max_partial = max_partial.max(acc.value().abs().to_f64());
    }

    Err(Error::IterationLimit {
        terms: MAX_SERIES_TERMS,
        last_term: term.abs().to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::DoubleDouble;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_argument_is_one() {
        let s = hyper0f3(0.3, 1.7, 2.5, 0.0, 1e-14).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(s.terms_used >= 1);
        assert_eq!(s.truncation_bound, 0.0);
    }

    #[test]
    fn unit_parameters_match_factorial_sum() {
        // direct oracle: Σ 1/(k!)^4
        let mut f = 1.0f64;
        let mut oracle = 1.0;
        for k in 1..30 {
            f *= k as f64;
            oracle += 1.0 / f.powi(4);
        }
        let s = hyper0f3(1.0, 1.0, 1.0, 1.0, 1e-14).unwrap();
        assert!(rel(s.value, oracle) < 1e-15);
        assert!((s.value - 2.063_274_6).abs() < 1e-6);
        assert_eq!(s.cancellation_digits, 0.0);
    }

    #[test]
    fn small_argument_leading_terms() {
        let z = 0.01;
        let third = z.powi(3) / ((28.0 / 27.0) * (15.0 / 8.0) * (935.0 / 216.0) * 6.0);
        let oracle = 1.0 + 7.2 * z + z * z / (55.0 / 54.0) + third;
        let s = hyper0f3(1.0 / 3.0, 0.5, 5.0 / 6.0, z, 1e-14).unwrap();
        assert!((s.value - 1.072_098_2).abs() < 1e-7);
        assert!((s.value - oracle).abs() < 1e-10);
    }

    #[test]
    fn negative_argument_reports_cancellation() {
        let s = hyper0f3(1.0, 1.0, 1.0, -200.0, 1e-14).unwrap();
        assert!(s.cancellation_digits > 0.0);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(matches!(hyper0f3(-2.0, 1.0, 1.0, 1.0, 1e-14), Err(Error::Domain(_))));
        assert!(matches!(hyper0f3(1.0, 1.0, 1.0, 1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            hyper0f3(1.0, 1.0, 1.0, 1e30, 1e-14),
            Err(Error::IterationLimit { .. })
        ));
    }

    #[test]
    fn largest_argument_in_use_converges_quickly() {
        // z = 12^6 / 6^4
        let s = hyper0f3(1.0 / 3.0, 2.0 / 3.0, 1.0, 2304.0, 1e-14).unwrap();
        assert!(s.terms_used < 60, "{} terms", s.terms_used);
    }

    #[test]
    fn wide_path_agrees_with_f64() {
        let b = [1.0 / 3.0, 0.5 + 1.0 / 6.0, 5.0 / 6.0 + 1.0 / 6.0];
        let bw = [
            DoubleDouble::from_ratio(2, 6),
            DoubleDouble::from_ratio(4, 6),
            DoubleDouble::from_ratio(6, 6),
        ];
        for z in [0.1, 3.0, 80.0, 400.0] {
            let a = hyper0f3(b[0], b[1], b[2], z, 1e-15).unwrap().value;
            let w = hyper0f3_in(bw, DoubleDouble::from_f64(z), 1e-30).unwrap();
            assert!(rel(a, w.value.to_f64()) < 1e-14);
            assert!(w.truncation_bound < 1e-29 * w.value.to_f64());
        }
    }

    #[test]
    fn contiguous_derivative_relation() {
        let (b1, b2, b3) = (1.0 / 3.0, 2.0 / 3.0, 7.0 / 6.0);
        let f = |z: f64| hyper0f3(b1, b2, b3, z, 1e-16).unwrap().value;
        for z in [0.1f64, 1.0, 10.0, 100.0] {
            let h = 1e-14f64.cbrt() * z.max(1.0);
            let numeric = (f(z + h) - f(z - h)) / (2.0 * h);
            let shifted = hyper0f3(b1 + 1.0, b2 + 1.0, b3 + 1.0, z, 1e-16).unwrap().value;
            let analytic = shifted / (b1 * b2 * b3);
            assert!(rel(numeric, analytic) < 1e-8, "z = {z}");
        }
    }

    proptest! {
        #[test]
        fn monotone_and_at_least_one(
            b1 in 0.1f64..3.0, b2 in 0.1f64..3.0, b3 in 0.1f64..3.0,
            z in 0.0f64..100.0, dz in 1e-3f64..10.0,
        ) {
            let lo = hyper0f3(b1, b2, b3, z, 1e-14).unwrap();
            let hi = hyper0f3(b1, b2, b3, z + dz, 1e-14).unwrap();
            prop_assert!(lo.value >= 1.0);
            prop_assert!(hi.value > lo.value);
            prop_assert_eq!(lo.cancellation_digits, 0.0);
        }
    }
}
