//! Near-origin and far-field forms of the radial solutions, and extraction of
//! the far-field parameters (A₊, A₋, C, φ) from sampled values.
//!
//! Far from the crossing the four solutions of the radial system split into an
//! oscillatory pair, dominated by the antisymmetric combination
//! `D = (φ₁ − φ₂)/2`, and an exponential pair e^{±z} dominated by the symmetric
//! combination `S = (φ₁ + φ₂)/2`, with `z = ⅔ρ^{3/2}`. Each has a formal
//! expansion
//!
//! ```text
//! (S, D) = e^{λz} ρ^{-3/4} Σ_k (s_k, d_k) ρ^{-3k/2},   λ ∈ {i, +1, -1}
//! ```
//!
//! whose coefficients follow from a three-term recursion. The series diverge,
//! so they are truncated just before their smallest term. Beyond leading order
//! the oscillatory solution carries a symmetric part `S ≈ m D / (2ρ³)`, which
//! is what makes ρ(φ₁² − φ₂²) decay only algebraically.

use crate::conic::{AzimuthalNumber, Spinor2};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Number of expansion coefficients kept per solution.
const EXPANSION_TERMS: usize = 60;

/// Coefficients of the near-origin power laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OriginCoeffs {
    pub a_plus: f64,
    pub a_minus: f64,
    pub b_plus: f64,
    pub b_minus: f64,
}

impl OriginCoeffs {
    /// The regular family: a₋ = b₋ = 0.
    pub fn regular(a_plus: f64, b_plus: f64) -> Self {
        Self {
            a_plus,
            a_minus: 0.0,
            b_plus,
            b_minus: 0.0,
        }
    }
}

/// Which functions multiply the far-field parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FarFieldBasis {
    /// Bare leading-order forms: ρ^{-3/4} e^{±z}(1,1) and ρ^{-3/4} cos(z+φ)(1,-1).
    Leading,
    /// Leading forms multiplied by their optimally truncated asymptotic series.
    #[default]
    Expansion,
}

/// Far-field parameters of a solution:
/// ρ^{-3/4}{(A₊e^z + A₋e^{-z})(1,1) + C cos(z+φ)(1,-1)} at leading order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FarField {
    pub a_plus_inf: f64,
    pub a_minus_inf: f64,
    pub amplitude_c: f64,
    /// Radians, in (−π, π].
    pub phase_phi: f64,
    pub basis: FarFieldBasis,
}

impl FarField {
    pub fn leading(a_plus_inf: f64, a_minus_inf: f64, amplitude_c: f64, phase_phi: f64) -> Self {
        Self {
            a_plus_inf,
            a_minus_inf,
            amplitude_c,
            phase_phi,
            basis: FarFieldBasis::Leading,
        }
    }

    /// The same far field with the growing component removed.
    pub fn bounded(&self) -> Self {
        Self {
            a_plus_inf: 0.0,
            ..*self
        }
    }

    fn oscillator(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude_c, self.phase_phi)
    }
}

/// z = ⅔ρ^{3/2}.
pub fn z_of_rho(rho: f64) -> f64 {
    2.0 / 3.0 * rho * rho.sqrt()
}

/// Inverse of [`z_of_rho`].
pub fn rho_of_z(z: f64) -> f64 {
    (1.5 * z).powf(2.0 / 3.0)
}

/// Phase constant −π(m/3 + 1/4) of the bounded solution for m > 0.
pub fn connection_phase(m: AzimuthalNumber) -> f64 {
    -PI * (m.abs().value() / 3.0 + 0.25)
}

fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

fn require_positive_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("far-field forms need rho > 0, got {rho}")))
    }
}

/// ρ^{-3/4} cos(⅔ρ^{3/2} − π(m/3 + 1/4)) (1, −1); for m < 0 the components
/// are interchanged.
pub fn leading_asymptote(m: AzimuthalNumber, rho: f64) -> Result<Spinor2> {
    require_positive_rho(rho)?;
    let v = rho.powf(-0.75) * (z_of_rho(rho) + connection_phase(m)).cos();
    Ok(Spinor2::new(v, -v).oriented(m))
}

/// Evaluate a far field at ρ. Negative m is handled by interchanging components.
pub fn far_field_eval(ff: &FarField, m: AzimuthalNumber, rho: f64) -> Result<Spinor2> {
    require_positive_rho(rho)?;
    match ff.basis {
        FarFieldBasis::Leading => Ok(eval_leading(ff, rho).oriented(m)),
        FarFieldBasis::Expansion => Ok(AsymptoticExpansion::new(m).eval(ff, rho)),
    }
}

fn eval_leading(ff: &FarField, rho: f64) -> Spinor2 {
    let z = z_of_rho(rho);
    let scale = rho.powf(-0.75);
    let mut sym = ff.a_minus_inf * (-z).exp();
    if ff.a_plus_inf != 0.0 {
        sym += ff.a_plus_inf * z.exp();
    }
    let anti = ff.amplitude_c * (z + ff.phase_phi).cos();
    Spinor2::from_sym_anti(scale * sym, scale * anti)
}

/// (a₊ρ^{m−1/2} + a₋ρ^{−m+1/2}, b₊ρ^{m+1/2} + b₋ρ^{−m−1/2}) for m > 0;
/// components interchanged for m < 0.
pub fn origin_form(oc: &OriginCoeffs, m: AzimuthalNumber, rho: f64) -> Result<Spinor2> {
    if rho < 0.0 || !rho.is_finite() {
        return Err(Error::Domain(format!("origin form needs rho >= 0, got {rho}")));
    }
    let mm = m.abs().value();
    if rho == 0.0 && (oc.a_minus != 0.0 || oc.b_minus != 0.0) {
        return Err(Error::Domain(
            "singular origin terms (a₋, b₋) cannot be evaluated at rho = 0".into(),
        ));
    }
    // m ∓ 1/2 are integers
    let n_lo = (m.abs().numerator() - 1) / 2;
    let mut phi1 = oc.a_plus * rho.powi(n_lo);
    let mut phi2 = oc.b_plus * rho.powi(n_lo + 1);
    if oc.a_minus != 0.0 {
        phi1 += oc.a_minus * rho.powf(-mm + 0.5);
    }
    if oc.b_minus != 0.0 {
        phi2 += oc.b_minus * rho.powf(-mm - 0.5);
    }
    Ok(Spinor2::new(phi1, phi2).oriented(m))
}

/// Result of fitting the regular origin power laws by log-log regression.
#[derive(Clone, Copy, Debug)]
pub struct OriginFit {
    pub coeffs: OriginCoeffs,
    pub slope1: f64,
    pub slope2: f64,
}

/// Fit ln|φ_j| = ln|c_j| + p_j ln ρ on small-ρ samples (m > 0 orientation).
pub fn fit_origin(samples: &[(f64, Spinor2)], m: AzimuthalNumber) -> Result<OriginFit> {
    if samples.len() < 2 {
        return Err(Error::Fit("origin fit needs at least two samples".into()));
    }
    let pts: Vec<(f64, Spinor2)> = samples.iter().map(|(r, s)| (*r, s.oriented(m))).collect();
    let regress = |pick: fn(&Spinor2) -> f64| -> Result<(f64, f64, f64)> {
        let n = pts.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        let mut sign = 0.0;
        for (r, s) in &pts {
            let v = pick(s);
            if !(*r > 0.0) || v == 0.0 {
                return Err(Error::Fit("origin fit needs rho > 0 and nonzero samples".into()));
            }
            sign = v.signum();
            let (x, y) = (r.ln(), v.abs().ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        Ok((slope, sign * intercept.exp(), sign))
    };
    let (slope1, a_plus, _) = regress(|s| s.phi1)?;
    let (slope2, b_plus, _) = regress(|s| s.phi2)?;
    Ok(OriginFit {
        coeffs: OriginCoeffs::regular(a_plus, b_plus),
        slope1,
        slope2,
    })
}

/// Truncated expansion values of the three far-field solutions at one ρ,
/// without the e^{λz} ρ^{-3/4} prefactor.
#[derive(Clone, Copy, Debug)]
pub struct ExpansionValues {
    pub z: f64,
    /// ρ^{-3/4}
    pub envelope: f64,
    /// (S, D) series of the e^{iz} solution.
    pub oscillatory: (Complex64, Complex64),
    pub growing: (f64, f64),
    pub decaying: (f64, f64),
    /// Magnitude of the first neglected term of each series.
    pub oscillatory_truncation: f64,
    pub exponential_truncation: f64,
}

/// Formal far-field expansions of the radial system for one m.
#[derive(Clone, Debug)]
pub struct AsymptoticExpansion {
    m: AzimuthalNumber,
    oscillatory: Vec<(Complex64, Complex64)>,
    growing: Vec<(f64, f64)>,
    decaying: Vec<(f64, f64)>,
}

/// Exponent of ρ in the k-th term, −3/4 − 3k/2.
fn beta(k: usize) -> f64 {
    -0.75 - 1.5 * k as f64
}

/// Coefficients (s_k, d_k) for e^{λz}: the oscillatory case has d₀ = 1,
/// the exponential cases s₀ = 1. Derived by substituting the ansatz into
///   S'' + S'/ρ − ρS − (μ²S − mD)/ρ² = 0,
///   D'' + D'/ρ + ρD − (μ²D − mS)/ρ² = 0,   μ² = m² + 1/4,
/// and collecting powers of ρ.
fn expansion_coeffs(m: f64, lambda: Complex64, terms: usize) -> Vec<(Complex64, Complex64)> {
    let mu2 = m * m + 0.25;
    let oscillatory = lambda.im != 0.0;
    let zero = Complex64::new(0.0, 0.0);
    let mut s = vec![zero; terms + 1];
    let mut d = vec![zero; terms + 1];
    if oscillatory {
        d[0] = Complex64::new(1.0, 0.0);
    } else {
        s[0] = Complex64::new(1.0, 0.0);
    }
    for k in 1..=terms {
        let c1 = beta(k - 1).powi(2) - mu2;
        let (s2, d2, c2) = if k >= 2 {
            (s[k - 2], d[k - 2], beta(k - 2).powi(2) - mu2)
        } else {
            (zero, zero, 0.0)
        };
        let transport = lambda * (-3.0 * (k as f64 - 1.0));
        let solvability = lambda * (3.0 * k as f64);
        if oscillatory {
            d[k] = (d[k - 1] * c1 + s[k - 1] * m) / solvability;
            s[k] = (transport * s[k - 1] + s2 * c2 + d2 * m) / 2.0;
        } else {
            s[k] = (s[k - 1] * c1 + d[k - 1] * m) / solvability;
            d[k] = -(transport * d[k - 1] + d2 * c2 + s2 * m) / 2.0;
        }
    }
    s.into_iter().zip(d).collect()
}

/// Sum Σ c_k u^k up to (excluding) the smallest term; returns the sum and that term's size.
fn truncated_sum<T, F>(coeffs: &[T], u: f64, size: F) -> (usize, f64)
where
    F: Fn(&T) -> f64,
{
    let mut best = (coeffs.len(), 0.0);
    let mut min_term = f64::INFINITY;
    let mut pow = 1.0;
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        pow *= u;
        let t = size(c) * pow;
        if t < min_term {
            min_term = t;
            best = (k, t);
        }
        if t < 1e-18 {
            return (k, t);
        }
    }
    best
}

impl AsymptoticExpansion {
    pub fn new(m: AzimuthalNumber) -> Self {
        let mm = m.abs().value();
        let osc = expansion_coeffs(mm, Complex64::new(0.0, 1.0), EXPANSION_TERMS);
        let to_real = |v: Vec<(Complex64, Complex64)>| -> Vec<(f64, f64)> {
            v.into_iter().map(|(s, d)| (s.re, d.re)).collect()
        };
        Self {
            m,
            oscillatory: osc,
            growing: to_real(expansion_coeffs(mm, Complex64::new(1.0, 0.0), EXPANSION_TERMS)),
            decaying: to_real(expansion_coeffs(mm, Complex64::new(-1.0, 0.0), EXPANSION_TERMS)),
        }
    }

    pub fn m(&self) -> AzimuthalNumber {
        self.m
    }

    /// Raw coefficients (s_k, d_k) of the e^{iz} solution.
    pub fn oscillatory_coeffs(&self) -> &[(Complex64, Complex64)] {
        &self.oscillatory
    }

    pub fn values(&self, rho: f64) -> ExpansionValues {
        let u = rho.powf(-1.5);
        let (ko, osc_trunc) = truncated_sum(&self.oscillatory, u, |(s, d)| s.norm() + d.norm());
        let (kg, grow_trunc) = truncated_sum(&self.growing, u, |(s, d)| s.abs() + d.abs());
        let (kd, decay_trunc) = truncated_sum(&self.decaying, u, |(s, d)| s.abs() + d.abs());

        let mut osc = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut pow = 1.0;
        for (s, d) in &self.oscillatory[..ko] {
            osc.0 += s * pow;
            osc.1 += d * pow;
            pow *= u;
        }
        let real_sum = |coeffs: &[(f64, f64)], n: usize| {
            let mut acc = (0.0, 0.0);
            let mut pow = 1.0;
            for (s, d) in &coeffs[..n] {
                acc.0 += s * pow;
                acc.1 += d * pow;
                pow *= u;
            }
            acc
        };
        ExpansionValues {
            z: z_of_rho(rho),
            envelope: rho.powf(-0.75),
            oscillatory: osc,
            growing: real_sum(&self.growing, kg),
            decaying: real_sum(&self.decaying, kd),
            oscillatory_truncation: osc_trunc,
            exponential_truncation: grow_trunc.max(decay_trunc),
        }
    }

    /// Evaluate a far field built on this expansion; components are
    /// interchanged for negative m.
    pub fn eval(&self, ff: &FarField, rho: f64) -> Spinor2 {
        if ff.basis == FarFieldBasis::Leading {
            return eval_leading(ff, rho).oriented(self.m);
        }
        let v = self.values(rho);
        let phase = Complex64::from_polar(1.0, v.z);
        let k = ff.oscillator() * phase;
        let mut sym = (k * v.oscillatory.0).re;
        let mut anti = (k * v.oscillatory.1).re;
        let decay = ff.a_minus_inf * (-v.z).exp();
        sym += decay * v.decaying.0;
        anti += decay * v.decaying.1;
        if ff.a_plus_inf != 0.0 {
            let grow = ff.a_plus_inf * v.z.exp();
            sym += grow * v.growing.0;
            anti += grow * v.growing.1;
        }
        Spinor2::from_sym_anti(v.envelope * sym, v.envelope * anti).oriented(self.m)
    }
}

/// Settings for [`extract_far_field`].
#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub basis: FarFieldBasis,
    /// Relative noise of the samples with respect to the growing solutions,
    /// i.e. the roundoff of the cancelling series evaluation.
    pub rel_noise: f64,
    pub max_condition: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            basis: FarFieldBasis::Expansion,
            rel_noise: 1e-15,
            max_condition: 1e8,
        }
    }
}

/// Fitted far field with diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct FarFieldFit {
    pub far_field: FarField,
    /// Condition number of the column-normalized weighted design matrix.
    pub condition: f64,
    pub rms_residual: f64,
    pub max_residual: f64,
}

/// Linear least squares for (A₊, A₋, C cos φ, C sin φ) on the symmetric and
/// antisymmetric combinations of the samples.
pub fn extract_far_field(
    samples: &[(f64, Spinor2)],
    m: AzimuthalNumber,
    opts: &FitOptions,
) -> Result<FarFieldFit> {
    if samples.len() < 8 {
        return Err(Error::Fit(format!(
            "need at least 8 samples, got {}",
            samples.len()
        )));
    }
    let mut pts: Vec<(f64, Spinor2)> = samples.iter().map(|(r, s)| (*r, s.oriented(m))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts[0].0 <= 0.0 {
        return Err(Error::Fit("far-field samples need rho > 0".into()));
    }
    let max_gap = pts
        .windows(2)
        .map(|w| z_of_rho(w[1].0) - z_of_rho(w[0].0))
        .fold(0.0, f64::max);
    if max_gap > 2.0 * PI / 6.0 {
        return Err(Error::Fit(format!(
            "samples too sparse: z gap {max_gap:.3} exceeds a sixth of a period"
        )));
    }

    let z_min = z_of_rho(pts[0].0);
    let z_max = z_of_rho(pts[pts.len() - 1].0);
    let expansion = AsymptoticExpansion::new(m.abs());

    let rows = 2 * pts.len();
    let mut design = DMatrix::<f64>::zeros(rows, 4);
    let mut rhs = DVector::<f64>::zeros(rows);
    let mut raw = DMatrix::<f64>::zeros(rows, 4);
    let mut raw_rhs = DVector::<f64>::zeros(rows);

    for (i, (rho, s)) in pts.iter().enumerate() {
        let z = z_of_rho(*rho);
        let env = rho.powf(-0.75);
        let (osc, grow, decay, model_error) = match opts.basis {
            FarFieldBasis::Leading => (
                (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
                (1.0, 0.0),
                (1.0, 0.0),
                rho.powf(-1.5),
            ),
            FarFieldBasis::Expansion => {
                let v = expansion.values(*rho);
                (
                    v.oscillatory,
                    v.growing,
                    v.decaying,
                    v.oscillatory_truncation + v.exponential_truncation * (-z).exp(),
                )
            }
        };
        let phase = Complex64::from_polar(1.0, z);
        let (os, od) = (phase * osc.0, phase * osc.1);
        let g = (z - z_max).exp();
        let d = (-(z - z_min)).exp();
        let noise = env * (model_error + opts.rel_noise * (1.0 + z.exp()));
        let w = 1.0 / noise;
        let (sym, anti) = s.sym_anti();
        let row_s = [g * grow.0 * env, d * decay.0 * env, os.re * env, -os.im * env];
        let row_d = [g * grow.1 * env, d * decay.1 * env, od.re * env, -od.im * env];
        for j in 0..4 {
            raw[(2 * i, j)] = row_s[j];
            raw[(2 * i + 1, j)] = row_d[j];
            design[(2 * i, j)] = w * row_s[j];
            design[(2 * i + 1, j)] = w * row_d[j];
        }
        raw_rhs[2 * i] = sym;
        raw_rhs[2 * i + 1] = anti;
        rhs[2 * i] = w * sym;
        rhs[2 * i + 1] = w * anti;
    }

    let norms: Vec<f64> = (0..4).map(|j| design.column(j).norm()).collect();
    if norms.iter().any(|&n| !(n > 0.0) || !n.is_finite()) {
        return Err(Error::Fit("degenerate design matrix".into()));
    }
    for j in 0..4 {
        design.column_mut(j).scale_mut(1.0 / norms[j]);
    }
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition <= opts.max_condition) {
        return Err(Error::Fit(format!(
            "ill-conditioned far-field fit (condition {condition:.3e})"
        )));
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let coef: Vec<f64> = (0..4).map(|j| sol[j] / norms[j]).collect();

    let residual = &raw * DVector::from_vec(coef.clone()) - raw_rhs;
    let rms_residual = (residual.norm_squared() / rows as f64).sqrt();
    let max_residual = residual.amax();

    let a_plus_inf = coef[0] * (-z_max).exp();
    let a_minus_inf = coef[1] * z_min.exp();
    let k = Complex64::new(coef[2], coef[3]);
    Ok(FarFieldFit {
        far_field: FarField {
            a_plus_inf,
            a_minus_inf,
            amplitude_c: k.norm(),
            phase_phi: wrap_phase(k.arg()),
            basis: opts.basis,
        },
        condition,
        rms_residual,
        max_residual,
    })
}
