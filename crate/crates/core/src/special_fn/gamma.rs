use super::wide::DoubleDouble;
use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x) by the Lanczos approximation (g = 7, nine terms), with reflection
/// below 1/2.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite argument {x}")));
    }
    if is_pole(x) {
        return Err(Error::Domain(format!("gamma has a pole at {x}")));
    }
    if x > 171.61 {
        return Err(Error::Range(format!("gamma({x}) overflows f64")));
    }
    if x == x.floor() && x <= 23.0 {
        // exact factorials
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return Ok(p);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    // split the power to stay finite up to x ~ 171
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * a
}

/// Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.
pub fn pochhammer(a: f64, k: usize) -> Result<f64> {
    let mut p = 1.0;
    for j in 0..k {
        p *= a + j as f64;
        if !p.is_finite() {
            return Err(Error::Range(format!("pochhammer({a}, {k}) overflows")));
        }
    }
    Ok(p)
}

/// B_{2k} for k = 1..=14 as (numerator, denominator).
const BERNOULLI: [(f64, f64); 14] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
];

/// ln Γ(y) by the Stirling series; accurate to double-double precision for y >= 30.
fn ln_gamma_stirling(y: DoubleDouble) -> DoubleDouble {
    let half = DoubleDouble::from_f64(0.5);
    let ln_two_pi = (DoubleDouble::PI.ldexp(1)).ln();
    let mut s = (y - half) * y.ln() - y + ln_two_pi * half;
    let inv = DoubleDouble::ONE / y;
    let inv2 = inv.sqr();
    let mut pow = inv;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        let c = DoubleDouble::from_f64(num) / DoubleDouble::from_f64(den * two_k * (two_k - 1.0));
        s += c * pow;
        pow *= inv2;
    }
    s
}

/// Γ(x) in double-double precision for x > 0.
pub fn gamma_wide(x: DoubleDouble) -> Result<DoubleDouble> {
    if !(x.hi > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "wide gamma requires a positive finite argument, got {}",
            x.to_f64()
        )));
    }
    if x.hi > 170.0 {
        return Err(Error::Range(format!("gamma({}) overflows", x.to_f64())));
    }
    let mut y = x;
    let mut denom = DoubleDouble::ONE;
    while y.hi < 30.0 {
        denom *= y;
        y += DoubleDouble::ONE;
    }
    Ok(ln_gamma_stirling(y).exp() / denom)
}
