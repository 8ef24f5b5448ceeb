//! Direct integration of the radial system as a first-order system, used to
//! check the series solutions, and a finite-difference defect test for any
//! candidate solution.
//!
//! ```text
//! φ₁'' = −φ₁'/ρ + ((m² + 1/4 − m)/ρ²) φ₁ + ρ φ₂
//! φ₂'' = −φ₂'/ρ + ((m² + 1/4 + m)/ρ²) φ₂ + ρ φ₁
//! ```
//!
//! Integration starts at a small seed radius from the leading series terms,
//! never at the singular point ρ = 0. Forward integration of the regular
//! solutions drifts toward the e^z manifold, so `rho_end` is capped at 10.

use crate::conic::{AzimuthalNumber, Basis, Spinor2};
use crate::error::{Error, Result};
use std::ops::{Add, Mul};

/// Largest radius the oracle integrates to.
pub const MAX_RHO_END: f64 = 10.0;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdeState {
    pub phi1: f64,
    pub dphi1: f64,
    pub phi2: f64,
    pub dphi2: f64,
}

impl OdeState {
    pub fn new(phi1: f64, dphi1: f64, phi2: f64, dphi2: f64) -> Self {
        Self {
            phi1,
            dphi1,
            phi2,
            dphi2,
        }
    }

    fn to_array(self) -> [f64; 4] {
        [self.phi1, self.dphi1, self.phi2, self.dphi2]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn values(&self) -> Spinor2 {
        Spinor2::new(self.phi1, self.phi2)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

impl Add for OdeState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.phi1 + o.phi1,
            self.dphi1 + o.dphi1,
            self.phi2 + o.phi2,
            self.dphi2 + o.dphi2,
        )
    }
}

impl Mul<OdeState> for f64 {
    type Output = OdeState;
    fn mul(self, s: OdeState) -> OdeState {
        OdeState::new(self * s.phi1, self * s.dphi1, self * s.phi2, self * s.dphi2)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub seed_rho: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-16,
            max_step: 0.05,
            seed_rho: 1e-3,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::Domain("integrator tolerances and max_step must be positive".into()));
        }
        if !(self.seed_rho > 0.0 && self.seed_rho <= 0.1) {
            return Err(Error::Domain(format!(
                "seed_rho must lie in (0, 0.1], got {}",
                self.seed_rho
            )));
        }
        Ok(())
    }
}

/// Derivative of the first-order system at ρ > 0.
pub fn radial_rhs(m: AzimuthalNumber, rho: f64, s: OdeState) -> Result<OdeState> {
    if rho == 0.0 {
        return Err(Error::Singular("the radial system is singular at rho = 0".into()));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("radial system needs rho > 0, got {rho}")));
    }
    Ok(rhs(m.value(), rho, s))
}

fn rhs(m: f64, rho: f64, s: OdeState) -> OdeState {
    let mu2 = m * m + 0.25;
    let inv = 1.0 / rho;
    let inv2 = inv * inv;
    OdeState::new(
        s.dphi1,
        -s.dphi1 * inv + (mu2 - m) * inv2 * s.phi1 + rho * s.phi2,
        s.dphi2,
        -s.dphi2 * inv + (mu2 + m) * inv2 * s.phi2 + rho * s.phi1,
    )
}

/// Value and derivative of pref·ρ^n·(1 + ρ⁶/(1296 b₁b₂b₃)).
fn two_terms(rho: f64, n: i32, pref: f64, b: [f64; 3]) -> (f64, f64) {
    let c = 1.0 / (1296.0 * b[0] * b[1] * b[2]);
    let r6 = rho.powi(6);
    let value = pref * rho.powi(n) * (1.0 + c * r6);
    let deriv = pref * (n as f64 * rho.powi(n - 1) + (n + 6) as f64 * c * rho.powi(n + 5));
    (value, deriv)
}

/// State of ℱ₁ or ℱ₂ at small ρ from the first two terms of each series.
pub fn series_seed(m: AzimuthalNumber, which: Basis, rho: f64) -> Result<OdeState> {
    if !m.is_positive() {
        return Err(Error::Domain(format!("series seed needs m > 0, got {m}")));
    }
    let p = m.numerator();
    let sixth = |n: i32| n as f64 / 6.0;
    let (c1, c2) = match which {
        Basis::F1 => (
            two_terms(rho, (p - 1) / 2, 1.0, [sixth(2), sixth(3 + p), sixth(5 + p)]),
            two_terms(rho, (p + 5) / 2, 1.0 / (6.0 + 2.0 * p as f64), [sixth(8), sixth(9 + p), sixth(5 + p)]),
        ),
        Basis::F2 => (
            two_terms(rho, (p + 7) / 2, 1.0 / (12.0 + 4.0 * p as f64), [sixth(10), sixth(9 + p), sixth(7 + p)]),
            two_terms(rho, (p + 1) / 2, 1.0, [sixth(4), sixth(3 + p), sixth(7 + p)]),
        ),
    };
    Ok(OdeState::new(c1.0, c1.1, c2.0, c2.1))
}

/// Accepted steps of an integration with cubic Hermite dense output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    points: Vec<(f64, OdeState)>,
    derivs: Vec<OdeState>,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn points(&self) -> &[(f64, OdeState)] {
        &self.points
    }

    pub fn accepted_steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn last(&self) -> (f64, OdeState) {
        self.points[self.points.len() - 1]
    }

    /// State at any ρ inside the integrated range.
    pub fn at(&self, rho: f64) -> Result<OdeState> {
        let (lo, hi) = (self.points[0].0, self.last().0);
        if !(rho >= lo && rho <= hi) {
            return Err(Error::Domain(format!(
                "rho = {rho} outside the integrated range [{lo}, {hi}]"
            )));
        }
        let i = match self.points.binary_search_by(|(r, _)| r.total_cmp(&rho)) {
            Ok(i) => return Ok(self.points[i].1),
            Err(i) => i.clamp(1, self.points.len() - 1) - 1,
        };
        let (r0, y0) = self.points[i];
        let (r1, y1) = self.points[i + 1];
        let (f0, f1) = (self.derivs[i].to_array(), self.derivs[i + 1].to_array());
        let h = r1 - r0;
        let t = (rho - r0) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let (a, b) = (y0.to_array(), y1.to_array());
        let mut out = [0.0; 4];
        for k in 0..4 {
            out[k] = h00 * a[k] + h10 * h * f0[k] + h01 * b[k] + h11 * h * f1[k];
        }
        Ok(OdeState::from_array(out))
    }
}

/// Integrate ℱ₁ or ℱ₂ from its series seed at `cfg.seed_rho` to `rho_end`.
pub fn propagate(
    m: AzimuthalNumber,
    which: Basis,
    rho_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let seed = series_seed(m, which, cfg.seed_rho)?;
    propagate_from(m, cfg.seed_rho, seed, rho_end, cfg)
}

/// Integrate an arbitrary initial state from `rho0 > 0` to `rho_end`.
pub fn propagate_from(
    m: AzimuthalNumber,
    rho0: f64,
    state: OdeState,
    rho_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(rho0 > 0.0) {
        return Err(Error::Singular("propagation must start at rho > 0".into()));
    }
    if !(rho_end > rho0) {
        return Err(Error::Domain(format!(
            "rho_end = {rho_end} must exceed the start radius {rho0}"
        )));
    }
    if rho_end > MAX_RHO_END {
        return Err(Error::Domain(format!(
            "rho_end = {rho_end} exceeds the forward-stability cap {MAX_RHO_END}"
        )));
    }
    let mv = m.value();
    let f = |r: f64, y: [f64; 4]| rhs(mv, r, OdeState::from_array(y)).to_array();
    let (points, derivs, rejected) = dopri5(f, rho0, state.to_array(), rho_end, cfg)?;
    Ok(Trajectory {
        points: points
            .into_iter()
            .map(|(r, y)| (r, OdeState::from_array(y)))
            .collect(),
        derivs: derivs.into_iter().map(OdeState::from_array).collect(),
        rejected_steps: rejected,
    })
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus the embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;
const SAFETY: f64 = 0.9;
const MAX_STEPS: usize = 1_000_000;

type Dense<const N: usize> = (Vec<(f64, [f64; N])>, Vec<[f64; N]>, usize);

fn dopri5<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Dense<N>>
where
    F: Fn(f64, [f64; N]) -> [f64; N],
{
    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(t, y);
    let mut points = vec![(t, y)];
    let mut derivs = vec![k0];
    let mut h = cfg.max_step.min(0.01 * (t_end - t0)).min(t0);
    let mut err_prev: f64 = 1e-4;
    let mut rejected = 0;

    for _ in 0..MAX_STEPS {
        if t >= t_end {
            return Ok((points, derivs, rejected));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let mut k = [[0.0; N]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            // the last stage sits at the fifth-order solution and is reused
            k[s] = f(t + C[s] * h, ys);
        }
        let mut y_new = y;
        for i in 0..N {
            for s in 0..6 {
                y_new[i] += h * A[6][s] * k[s][i];
            }
        }
        let mut err = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for s in 0..7 {
                e += E[s] * k[s][i];
            }
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            err += (h * e / scale).powi(2);
        }
        let err = (err / N as f64).sqrt();

        if !err.is_finite() {
            h *= 0.2;
            rejected += 1;
        } else if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k0 = k[6];
            points.push((t, y));
            derivs.push(k0);
            let fac = SAFETY * err.max(1e-10).powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
            h *= fac.clamp(0.2, 10.0);
            err_prev = err.max(1e-4);
        } else {
            let fac = SAFETY * err.powf(-PI_ALPHA);
            h *= fac.clamp(0.2, 1.0);
            rejected += 1;
        }
        h = h.min(cfg.max_step);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Stiffness { rho: t, step: h });
        }
    }
    Err(Error::Stiffness { rho: t, step: h })
}

/// Finite-difference settings for [`residual`].
#[derive(Clone, Copy, Debug)]
pub struct ResidualOptions {
    /// Largest finite-difference step; near the origin the step shrinks to ρ/100.
    pub step: f64,
    /// Added to the local scale to keep zero solutions from dividing by zero.
    pub floor: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            step: 5e-3,
            floor: 1e-300,
        }
    }
}

/// Max over the grid of ‖defect‖ / (sum of the magnitudes of the terms in
/// each equation + floor), with 5-point derivatives of the sampled solution.
pub fn residual<F>(m: AzimuthalNumber, sampler: F, rho_grid: &[f64], opts: &ResidualOptions) -> Result<f64>
where
    F: Fn(f64) -> Result<Spinor2>,
{
    let mv = m.value();
    let mu2 = mv * mv + 0.25;
    let mut worst = 0.0f64;
    for &rho in rho_grid {
        let h = opts.step.min(0.01 * rho);
        if !(h > 0.0) {
            return Err(Error::Domain(format!("residual grid point {rho} must be > 0")));
        }
        let s: Vec<Spinor2> = (-2..=2)
            .map(|i| sampler(rho + i as f64 * h))
            .collect::<Result<_>>()?;
        let d1 = |g: fn(&Spinor2) -> f64| {
            (-g(&s[4]) + 8.0 * g(&s[3]) - 8.0 * g(&s[1]) + g(&s[0])) / (12.0 * h)
        };
        let d2 = |g: fn(&Spinor2) -> f64| {
            (-g(&s[4]) + 16.0 * g(&s[3]) - 30.0 * g(&s[2]) + 16.0 * g(&s[1]) - g(&s[0]))
                / (12.0 * h * h)
        };
        let c = s[2];
        let terms1 = [
            d2(|x| x.phi1),
            d1(|x| x.phi1) / rho,
            -(mu2 - mv) / (rho * rho) * c.phi1,
            -rho * c.phi2,
        ];
        let terms2 = [
            d2(|x| x.phi2),
            d1(|x| x.phi2) / rho,
            -(mu2 + mv) / (rho * rho) * c.phi2,
            -rho * c.phi1,
        ];
        let defect = terms1.iter().sum::<f64>().abs().max(terms2.iter().sum::<f64>().abs());
        let scale = terms1
            .iter()
            .map(|x| x.abs())
            .sum::<f64>()
            .max(terms2.iter().map(|x| x.abs()).sum::<f64>());
        worst = worst.max(defect / (scale + opts.floor));
    }
    Ok(worst)
}
