//! Physics outputs: the Zeeman factor g(m), the electronic period T_e, the
//! splitting ΔE(m) = M^{-1/6} g(m) B / T_e, the WKB radial form and its
//! matching to the crossing solution.

use crate::asymptotics::{connection_phase, rho_of_z, z_of_rho};
use crate::conic::{AzimuthalNumber, ConicConfig, ConicFunction};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use std::f64::consts::PI;
use std::path::Path;

/// Largest cutoff radius g_factor will integrate to.
pub const MAX_RHO_MAX: f64 = 1e5;
const MAX_PANELS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GResult {
    pub value: f64,
    pub quadrature_error: f64,
    /// Size of the analytic tail beyond `rho_max`, which is included in `value`.
    pub tail_bound: f64,
    pub rho_max: f64,
}

/// g(m) = ∫₀^∞ ρ(φ₁² − φ₂²) dρ for the crossing solution.
pub fn g_factor(m: AzimuthalNumber, tol: f64) -> Result<GResult> {
    check_g_tol(tol)?;
    let f = ConicFunction::new(m, &ConicConfig::from_env())?;
    g_factor_with(&f, tol)
}

fn check_g_tol(tol: f64) -> Result<()> {
    if !(1e-10..=1e-2).contains(&tol) {
        return Err(Error::Domain(format!("g tolerance must lie in [1e-10, 1e-2], got {tol}")));
    }
    Ok(())
}

/// As [`g_factor`] for a prepared solution.
///
/// The symmetric channel carries a driven part S ≈ mD/(2ρ³), so far out
/// ρ(φ₁² − φ₂²) = 4ρSD ≈ 2mC²cos²(z + φ)ρ^{-7/2}. The integral is taken
/// over whole oscillation periods up to `rho_max`, where the remaining
/// mean tail mC²(2/5)rho_max^{-5/2} is below `tol`, and that tail is added.
pub fn g_factor_with(f: &ConicFunction, tol: f64) -> Result<GResult> {
    check_g_tol(tol)?;
    let m = f.m().value();
    let c2 = f.far_field().amplitude_c.powi(2);
    let rs = f.params().rho_switch;
    let integrand = |rho: f64| -> Result<f64> {
        let s = f.eval(rho)?;
        Ok(rho * (s.phi1 - s.phi2) * (s.phi1 + s.phi2))
    };

    let rho_needed = (0.4 * m.abs() * c2 / tol).powf(0.4).max(rs);
    if rho_needed > MAX_RHO_MAX {
        return Err(Error::Precision(format!(
            "g tail needs rho_max = {rho_needed:.3e} > {MAX_RHO_MAX:e}"
        )));
    }

    let near = integrate(integrand, 0.0, rs, tol / 4.0, 0.0, MAX_PANELS)?;

    // panels of one period in z = ⅔ρ^{3/2}
    let z0 = z_of_rho(rs);
    let periods = ((z_of_rho(rho_needed) - z0) / PI).ceil().max(0.0) as usize;
    let share = tol / 4.0 / periods.max(1) as f64;
    let mut far_value = 0.0;
    let mut far_error = 0.0;
    let mut lo = rs;
    for k in 1..=periods {
        let hi = rho_of_z(z0 + k as f64 * PI);
        let r = integrate(integrand, lo, hi, share, 0.0, 50)?;
        far_value += r.value;
        far_error += r.error;
        lo = hi;
    }
    let rho_max = lo;
    let tail = m * c2 * 0.4 * rho_max.powf(-2.5);

    Ok(GResult {
        value: near.value + far_value + tail,
        quadrature_error: near.error + far_error,
        tail_bound: tail.abs(),
        rho_max,
    })
}

/// Closed-form families and tabulated lower surfaces.
#[derive(Clone, Debug)]
pub enum Potential {
    /// E₁ = −r(1 − r/a), turning points 0 and a.
    ParabolicCone { a: f64 },
    /// E₁ = −d + (2d/w)|r − w/2|, turning points 0 and w.
    Vee { depth: f64, width: f64 },
    /// Monotone cubic (PCHIP) through the samples.
    Tabulated(Pchip),
}

/// Lower electronic surface with its two turning points.
#[derive(Clone, Debug)]
pub struct PotentialCurve {
    potential: Potential,
    scale: f64,
    r_left: f64,
    r_right: f64,
}

impl PotentialCurve {
    pub fn parabolic_cone(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("parabolic cone needs a > 0, got {a}")));
        }
        Ok(Self {
            potential: Potential::ParabolicCone { a },
            scale: 1.0,
            r_left: 0.0,
            r_right: a,
        })
    }

    pub fn vee(depth: f64, width: f64) -> Result<Self> {
        if !(depth > 0.0 && width > 0.0 && depth.is_finite() && width.is_finite()) {
            return Err(Error::Domain(format!(
                "vee needs depth > 0 and width > 0, got {depth}, {width}"
            )));
        }
        Ok(Self {
            potential: Potential::Vee { depth, width },
            scale: 1.0,
            r_left: 0.0,
            r_right: width,
        })
    }

    /// Samples with strictly increasing r; E₁ must be negative on exactly one
    /// run of samples, bounded by non-negative samples on both sides.
    pub fn tabulated(r: Vec<f64>, e: Vec<f64>) -> Result<Self> {
        let p = Pchip::new(r, e)?;
        let (r_left, r_right) = p.turning_points()?;
        Ok(Self {
            potential: Potential::Tabulated(p),
            scale: 1.0,
            r_left,
            r_right,
        })
    }

    /// Two numeric columns (r, E₁); blank lines and lines starting with '#' are skipped.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut e = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!(
                    "potential table line {}: expected two columns, got '{line}'",
                    n + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("potential table line {}: bad number '{s}'", n + 1))
                })
            };
            r.push(parse(cols[0])?);
            e.push(parse(cols[1])?);
        }
        Self::tabulated(r, e)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse_table(&std::fs::read_to_string(path)?)
    }

    /// "parabolic-cone:a=<a>", "vee:depth=<d>,width=<w>" or "file:<path>".
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("potential spec '{spec}' lacks a ':'")))?;
        if kind == "file" {
            return Self::from_file(Path::new(rest));
        }
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number in '{kv}'")))?;
            params.insert(k.trim().to_string(), v);
        }
        let take = |params: &mut std::collections::BTreeMap<String, f64>, key: &str| {
            params
                .remove(key)
                .ok_or_else(|| Error::Parse(format!("potential '{kind}' needs '{key}='")))
        };
        let curve = match kind {
            "parabolic-cone" => Self::parabolic_cone(take(&mut params, "a")?)?,
            "vee" => {
                let d = take(&mut params, "depth")?;
                let w = take(&mut params, "width")?;
                Self::vee(d, w)?
            }
            _ => return Err(Error::Parse(format!("unknown potential kind '{kind}'"))),
        };
        if let Some(k) = params.keys().next() {
            return Err(Error::Parse(format!("unknown parameter '{k}' for '{kind}'")));
        }
        Ok(curve)
    }

    /// The same curve with E₁ multiplied by `factor` > 0; turning points are unchanged.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Domain(format!("energy scale must be positive, got {factor}")));
        }
        Ok(Self {
            scale: self.scale * factor,
            ..self.clone()
        })
    }

    pub fn turning_points(&self) -> (f64, f64) {
        (self.r_left, self.r_right)
    }

    pub fn energy(&self, r: f64) -> f64 {
        self.scale
            * match &self.potential {
                Potential::ParabolicCone { a } => -r * (1.0 - r / a),
                Potential::Vee { depth, width } => {
                    -depth + 2.0 * depth / width * (r - width / 2.0).abs()
                }
                Potential::Tabulated(p) => p.eval(r),
            }
    }

    fn slowness(&self, r: f64) -> Result<f64> {
        let e = self.energy(r);
        if !(e < 0.0) {
            return Err(Error::Domain(format!(
                "E1({r}) = {e} is not negative between the turning points"
            )));
        }
        Ok(1.0 / (-e).sqrt())
    }
}

/// T_e = ∫ dr / √(−E₁(r)) between the turning points.
pub fn electronic_period(curve: &PotentialCurve, tol: f64) -> Result<f64> {
    let (a, b) = curve.turning_points();
    transit_time(curve, a, b, tol)
}

/// ∫_a^b dr / √(−E₁(r)) for r_left ≤ a < b ≤ r_right. An end at a turning
/// point is handled with r = r_t ± u², which removes the inverse square root.
pub fn transit_time(curve: &PotentialCurve, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (rl, rr) = curve.turning_points();
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(rl <= a && a < b && b <= rr) {
        return Err(Error::Domain(format!(
            "interval [{a}, {b}] must lie within the turning points [{rl}, {rr}]"
        )));
    }
    let mid = 0.5 * (a + b);
    let left = if a == rl {
        integrate(
            |u| Ok(2.0 * u * curve.slowness(a + u * u)?),
            0.0,
            (mid - a).sqrt(),
            0.0,
            tol / 4.0,
            MAX_PANELS,
        )?
    } else {
        integrate(|r| curve.slowness(r), a, mid, 0.0, tol / 4.0, MAX_PANELS)?
    };
    let right = if b == rr {
        integrate(
            |u| Ok(2.0 * u * curve.slowness(b - u * u)?),
            0.0,
            (b - mid).sqrt(),
            0.0,
            tol / 4.0,
            MAX_PANELS,
        )?
    } else {
        integrate(|r| curve.slowness(r), mid, b, 0.0, tol / 4.0, MAX_PANELS)?
    };
    Ok(left.value + right.value)
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes; it has no
/// extrema between samples, so each segment holds at most one root.
#[derive(Clone, Debug)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(Error::Domain("a table needs at least three (r, E1) rows".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Domain("table values must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("table r values must be strictly increasing".into()));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(Self { x, y, d })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    fn root_in(&self, i: usize) -> f64 {
        let (mut lo, mut hi) = (self.x[i], self.x[i + 1]);
        let lo_sign = self.y[i] < 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.eval(mid) < 0.0) == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn turning_points(&self) -> Result<(f64, f64)> {
        let neg: Vec<usize> = (0..self.y.len()).filter(|&i| self.y[i] < 0.0).collect();
        let (first, last) = match (neg.first(), neg.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(Error::Domain("tabulated E1 is never negative".into())),
        };
        if last - first + 1 != neg.len() {
            return Err(Error::Domain(
                "tabulated E1 has more than two turning points".into(),
            ));
        }
        if first == 0 || last == self.y.len() - 1 {
            return Err(Error::Domain(
                "tabulated E1 must be non-negative at both ends of the table".into(),
            ));
        }
        let left = if self.y[first - 1] == 0.0 {
            self.x[first - 1]
        } else {
            self.root_in(first - 1)
        };
        let right = if self.y[last + 1] == 0.0 {
            self.x[last + 1]
        } else {
            self.root_in(last)
        };
        Ok((left, right))
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Mass ratio, gap parameter and electronic period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeemanParams {
    pub mass_ratio_m: f64,
    pub field_b: f64,
    pub t_e: f64,
}

impl ZeemanParams {
    pub fn new(mass_ratio_m: f64, field_b: f64, t_e: f64) -> Result<Self> {
        if !(mass_ratio_m > 0.0 && mass_ratio_m.is_finite()) {
            return Err(Error::Domain(format!("mass ratio must be positive, got {mass_ratio_m}")));
        }
        if !(t_e > 0.0 && t_e.is_finite()) {
            return Err(Error::Domain(format!("T_e must be positive, got {t_e}")));
        }
        if !(field_b >= 0.0 && field_b.is_finite()) {
            return Err(Error::Domain(format!("B must be non-negative, got {field_b}")));
        }
        Ok(Self {
            mass_ratio_m,
            field_b,
            t_e,
        })
    }

    /// ε = M^{-1/3}
    pub fn epsilon(&self) -> f64 {
        self.mass_ratio_m.powf(-1.0 / 3.0)
    }
}

/// ΔE(m) = M^{-1/6} g B / T_e; the sign of m enters only through g.
pub fn zeeman_splitting(_m: AzimuthalNumber, p: &ZeemanParams, g: f64) -> f64 {
    p.mass_ratio_m.powf(-1.0 / 6.0) * g * p.field_b / p.t_e
}

/// (N / r^{3/4}) cos(√M ⅔ r^{3/2} + phase)
pub fn wkb_radial(r: f64, mass_ratio_m: f64, n: f64, phase: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("WKB form needs r > 0, got {r}")));
    }
    Ok(n * r.powf(-0.75) * (mass_ratio_m.sqrt() * z_of_rho(r) + phase).cos())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchingReport {
    /// max |envelope of M^{1/4}ℱ_c(M^{1/3}r) / envelope of the WKB form − 1|
    pub envelope_deviation: f64,
    /// max |phase difference| in radians, wrapped to [0, π]
    pub phase_deviation: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub samples: usize,
}

/// Compare M^{1/4}ℱ_c(m; M^{1/3}r) with the WKB form (N = 1, phase from the
/// connection formula) over 10M^{-1/3} ≤ r_lo ≤ r_hi ≤ 0.1.
pub fn matching_check(m: AzimuthalNumber, mass_ratio_m: f64, r_window: (f64, f64)) -> Result<MatchingReport> {
    check_window(mass_ratio_m, r_window)?;
    let f = ConicFunction::new(m, &ConicConfig::from_env())?;
    matching_check_with(&f, mass_ratio_m, r_window)
}

fn check_window(mass_ratio_m: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if !(mass_ratio_m > 0.0 && mass_ratio_m.is_finite()) {
        return Err(Error::Domain(format!("mass ratio must be positive, got {mass_ratio_m}")));
    }
    let floor = 10.0 * mass_ratio_m.powf(-1.0 / 3.0);
    if !(lo <= hi && lo >= floor * (1.0 - 1e-12) && hi <= 0.1) {
        return Err(Error::Domain(format!(
            "matching window [{lo}, {hi}] must satisfy {floor:.3e} <= r_lo <= r_hi <= 0.1"
        )));
    }
    Ok(())
}

pub fn matching_check_with(
    f: &ConicFunction,
    mass_ratio_m: f64,
    r_window: (f64, f64),
) -> Result<MatchingReport> {
    check_window(mass_ratio_m, r_window)?;
    let scale = mass_ratio_m.cbrt();
    let (rho_lo, rho_hi) = (scale * r_window.0, scale * r_window.1);
    let phase0 = connection_phase(f.m());
    let samples = if rho_lo == rho_hi { 1 } else { 200 };
    // antisymmetric channel in the m > 0 orientation
    let w = |rho: f64| -> Result<f64> {
        let s = f.eval(rho)?.oriented(f.m());
        Ok(rho.powf(0.75) * s.sym_anti().1)
    };
    let mut env_dev = 0.0f64;
    let mut phase_dev = 0.0f64;
    for i in 0..samples {
        let t = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
        let rho = rho_lo * (rho_hi / rho_lo).powf(t);
        let h = 0.005 / rho.sqrt();
        let dw = (-w(rho + 2.0 * h)? + 8.0 * w(rho + h)? - 8.0 * w(rho - h)? + w(rho - 2.0 * h)?)
            / (12.0 * h);
        let wv = w(rho)?;
        let q = -dw / rho.sqrt();
        // the WKB form has unit envelope in these units: r^{3/4}·r^{-3/4}
        env_dev = env_dev.max((wv.hypot(q) - 1.0).abs());
        let target = z_of_rho(rho) + phase0;
        let d = (q.atan2(wv) - target).rem_euclid(2.0 * PI);
        phase_dev = phase_dev.max(d.min(2.0 * PI - d));
    }
    Ok(MatchingReport {
        envelope_deviation: env_dev,
        phase_deviation: phase_dev,
        rho_min: rho_lo,
        rho_max: rho_hi,
        samples,
    })
}
