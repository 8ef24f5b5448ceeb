//! Adaptive 7-point Gauss / 15-point Kronrod quadrature.

use crate::error::{Error, Result};
use crate::special_fn::CompensatedSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, Default)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of |Kronrod − Gauss| over the final panels.
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// One G7/K15 application on [a, b].
pub fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x)?, f(c + x)?);
        k += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let value = k * h;
    // never report less than the roundoff of the rule itself
    let error = ((k - g) * h).abs().max(50.0 * f64::EPSILON * abs_sum * h.abs());
    Ok((value, error))
}

/// Bisect the panel with the largest error until the total error is below
/// max(abs_tol, rel_tol·|value|). Panels are summed left to right, so the
/// result does not depend on the refinement order.
pub fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(QuadResult::default());
    }
    let (value, error) = gk15(&mut f, a, b)?;
    let mut panels = vec![Panel { a, b, value, error }];
    let mut evaluations = 15;
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if panels.len() >= max_panels {
            return Err(Error::Precision(format!(
                "quadrature on [{a}, {b}] reached {max_panels} panels with error {err:.3e}"
            )));
        }
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&mut f, p.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, p.b)?;
        evaluations += 30;
        // stop refining a panel once halving no longer helps
        let floor = 1e-16 * (v1.abs() + v2.abs());
        panels.push(Panel { a: p.a, b: mid, value: v1, error: e1.max(floor) });
        panels.push(Panel { a: mid, b: p.b, value: v2, error: e2.max(floor) });
        if (mid - p.a).abs() <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            return Err(Error::Precision(format!("quadrature panel collapsed near {mid}")));
        }
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut sum = CompensatedSum::new();
    let mut error = 0.0;
    for p in &panels {
        sum.add(p.value);
        error += p.error;
    }
    Ok(QuadResult {
        value: sum.value(),
        error,
        evaluations,
    })
}
