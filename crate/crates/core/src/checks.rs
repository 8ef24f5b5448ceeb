//! Self-checks run by `conic check`: each compares the library against an
//! independent reference or an exact identity.

use crate::asymptotics::connection_phase;
use crate::conic::{basis_f1, basis_f2, AzimuthalNumber, Basis, ConicConfig, ConicFunction};
use crate::error::Result;
use crate::ode_oracle::{propagate, residual, IntegratorConfig, ResidualOptions};
use crate::special_fn::hyper0f3;
use crate::zeeman::{
    electronic_period, g_factor_with, matching_check_with, zeeman_splitting, PotentialCurve,
    ZeemanParams,
};
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn half(n: i32) -> AzimuthalNumber {
    AzimuthalNumber::new(n).expect("odd numerator")
}

fn outcome(name: &'static str, r: Result<(bool, String)>) -> CheckOutcome {
    match r {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn wrapped(d: f64) -> f64 {
    let d = d.rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Run every check; the list order is fixed.
pub fn run_all() -> Vec<CheckOutcome> {
    let solutions: Result<Vec<ConicFunction>> = [1, 3, 5]
        .iter()
        .map(|&n| ConicFunction::new(half(n), &ConicConfig::standard()))
        .collect();
    let solutions = match solutions {
        Ok(s) => s,
        Err(e) => {
            return vec![CheckOutcome {
                name: "construction",
                passed: false,
                detail: format!("error: {e}"),
            }]
        }
    };
    vec![
        outcome("g values", g_values(&solutions)),
        outcome("g antisymmetry", g_antisymmetry(&solutions)),
        outcome("connection formula", connection_formula()),
        outcome("series vs ODE", oracle_equivalence()),
        outcome("ODE defect", defect(&solutions)),
        outcome("branch overlap", branch_overlap(&solutions)),
        outcome("T_e closed forms", period_closed_forms()),
        outcome("M^-1/6 scaling and matching", scaling_and_matching(&solutions)),
        outcome("single-valuedness", single_valuedness(&solutions)),
        outcome("0F3 properties", hyper_properties()),
    ]
}

fn g_values(sol: &[ConicFunction]) -> Result<(bool, String)> {
    let published = [0.961, 0.543, 0.396];
    let mut ok = true;
    let mut detail = Vec::new();
    for (f, p) in sol.iter().zip(published) {
        let g = g_factor_with(f, 1e-8)?;
        ok &= (g.value - p).abs() <= 0.002;
        detail.push(format!("g({})={:.6}", f.m(), g.value));
    }
    Ok((ok, detail.join(" ")))
}

fn g_antisymmetry(sol: &[ConicFunction]) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for f in sol {
        let neg = ConicFunction::new(-f.m(), f.config())?;
        let a = g_factor_with(f, 1e-6)?.value;
        let b = g_factor_with(&neg, 1e-6)?.value;
        worst = worst.max((a + b).abs());
    }
    Ok((worst <= 1e-12, format!("max |g(m)+g(-m)| = {worst:.1e}")))
}

fn connection_formula() -> Result<(bool, String)> {
    let mut worst_phase = 0.0f64;
    let mut worst_amp = 0.0f64;
    for n in [1, 3, 5] {
        let f = ConicFunction::new(half(n), &ConicConfig::wide())?;
        let ff = f.fit().far_field;
        worst_phase = worst_phase.max(wrapped(ff.phase_phi - connection_phase(half(n))));
        worst_amp = worst_amp.max((ff.amplitude_c - 1.0).abs());
    }
    Ok((
        worst_phase <= 1e-3 && worst_amp <= 1e-3,
        format!("phase {worst_phase:.1e} rad, amplitude {worst_amp:.1e}"),
    ))
}

fn oracle_equivalence() -> Result<(bool, String)> {
    let cfg = IntegratorConfig::default();
    let mut worst = 0.0f64;
    for n in [1, 3, 5] {
        let m = half(n);
        for which in [Basis::F1, Basis::F2] {
            let traj = propagate(m, which, 4.0, &cfg)?;
            for rho in [0.5, 1.0, 2.0, 4.0] {
                let ode = traj.at(rho)?.values();
                let series = match which {
                    Basis::F1 => basis_f1(m, rho, 1e-16)?,
                    Basis::F2 => basis_f2(m, rho, 1e-16)?,
                };
                worst = worst
                    .max(((ode.phi1 - series.phi1) / series.phi1).abs())
                    .max(((ode.phi2 - series.phi2) / series.phi2).abs());
            }
        }
    }
    Ok((worst <= 1e-8, format!("max relative difference {worst:.1e}")))
}

fn defect(sol: &[ConicFunction]) -> Result<(bool, String)> {
    let grid: Vec<f64> = (0..=590).map(|i| 0.1 + 0.01 * i as f64).collect();
    let mut worst = 0.0f64;
    for f in sol {
        worst = worst.max(residual(f.m(), |r| f.eval(r), &grid, &ResidualOptions::default())?);
    }
    Ok((worst <= 1e-6, format!("max relative residual {worst:.1e}")))
}

fn branch_overlap(sol: &[ConicFunction]) -> Result<(bool, String)> {
    let worst = sol.iter().map(|f| f.overlap_error()).fold(0.0, f64::max);
    Ok((worst <= 1e-6, format!("max disagreement {worst:.1e}")))
}

fn period_closed_forms() -> Result<(bool, String)> {
    let a = electronic_period(&PotentialCurve::parabolic_cone(1.0)?, 1e-12)?;
    let b = electronic_period(&PotentialCurve::vee(1.0, 2.0)?, 1e-12)?;
    let (ea, eb) = (((a - PI) / PI).abs(), ((b - 4.0) / 4.0).abs());
    Ok((ea <= 1e-8 && eb <= 1e-8, format!("pi: {ea:.1e}, 4: {eb:.1e}")))
}

fn scaling_and_matching(sol: &[ConicFunction]) -> Result<(bool, String)> {
    let m = half(1);
    let p = ZeemanParams::new(1e6, 1.0, 1.0)?;
    let q = ZeemanParams::new(32e6, 1.0, 1.0)?;
    let ratio = zeeman_splitting(m, &p, 0.961) / zeeman_splitting(m, &q, 0.961);
    let scaling = ((ratio - 2f64.powf(5.0 / 6.0)) / ratio).abs();
    let reports: Vec<_> = [1e6, 1e8, 1e10]
        .iter()
        .map(|&mm| matching_check_with(&sol[0], mm, (0.1, 0.1)))
        .collect::<Result<_>>()?;
    let decreasing = reports.windows(2).all(|w| {
        w[1].envelope_deviation < w[0].envelope_deviation
            && w[1].phase_deviation < w[0].phase_deviation
    });
    Ok((
        scaling <= 1e-14 && decreasing,
        format!(
            "ratio error {scaling:.1e}; phase deviations {:.1e} {:.1e} {:.1e}",
            reports[0].phase_deviation, reports[1].phase_deviation, reports[2].phase_deviation
        ),
    ))
}

fn single_valuedness(sol: &[ConicFunction]) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for f in sol {
        for rho in [0.0, 0.5, 2.0, 6.5, 12.0] {
            for k in 0..12 {
                let theta = k as f64 * PI / 6.0;
                let a = f.wavefunction(rho, theta)?;
                let b = f.wavefunction(rho, theta + 2.0 * PI)?;
                worst = worst.max((a[0] - b[0]).norm()).max((a[1] - b[1]).norm());
            }
        }
    }
    let rejected = "2".parse::<AzimuthalNumber>().is_err() && AzimuthalNumber::new(4).is_err();
    Ok((
        worst <= 1e-14 && rejected,
        format!("max |Ψ(θ+2π)−Ψ(θ)| = {worst:.1e}, integer m rejected: {rejected}"),
    ))
}

fn hyper_properties() -> Result<(bool, String)> {
    let (b1, b2, b3) = (1.0 / 3.0, 2.0 / 3.0, 7.0 / 6.0);
    let mut worst = 0.0f64;
    for z in [0.1f64, 1.0, 10.0, 100.0] {
        let h = 1e-14f64.cbrt() * z.max(1.0);
        let f = |x: f64| hyper0f3(b1, b2, b3, x, 1e-16).map(|s| s.value);
        let numeric = (f(z + h)? - f(z - h)?) / (2.0 * h);
        let analytic = hyper0f3(b1 + 1.0, b2 + 1.0, b3 + 1.0, z, 1e-16)?.value / (b1 * b2 * b3);
        worst = worst.max(((numeric - analytic) / analytic).abs());
    }
    let unit = hyper0f3(1.0, 1.0, 1.0, 1.0, 1e-14)?.value;
    let ok = worst <= 1e-8 && (unit - 2.063_274_6).abs() <= 1e-6;
    Ok((ok, format!("derivative relation {worst:.1e}, 0F3(;1,1,1;1) = {unit:.8}")))
}
