//! The regular basis solutions ℱ₁, ℱ₂ of the radial system, the bounded
//! combination ℱ_c = A₁ℱ₁ + A₂ℱ₂ and the full two-component wavefunction.
//!
//! With m = p/2 (p odd) every power of ρ in the basis is an integer and every
//! ₀F₃ parameter is a multiple of 1/6, so both are formed exactly.
//!
//! ℱ₁ and ℱ₂ each grow like e^z with z = ⅔ρ^{3/2}, while ℱ_c stays O(ρ^{-3/4}).
//! The series branch therefore cancels about log10(|A_jℱ_j| ρ^{3/4}) digits.
//! Up to `rho_switch` the series is summed directly and the lost digits are
//! tracked; beyond it ℱ_c is continued by a far-field form fitted on
//! [rho_switch − 2, rho_switch]. The regular family has a₋ = b₋ = 0 at the
//! origin, so the degenerate exponents at m = 1/2 never matter.

use crate::asymptotics::{
    extract_far_field, rho_of_z, z_of_rho, AsymptoticExpansion, FarField, FarFieldBasis,
    FarFieldFit, FitOptions,
};
use crate::error::{Error, Result};
use crate::special_fn::{gamma_fn, gamma_wide, hyper0f3_in, DoubleDouble, Real};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

/// Half-odd-integer azimuthal number m = numerator/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AzimuthalNumber {
    numerator: i32,
}

impl AzimuthalNumber {
    /// Fails unless `numerator` is odd, so integer m cannot be represented.
    pub fn new(numerator: i32) -> Result<Self> {
        if numerator % 2 == 0 {
            return Err(Error::Domain(format!(
                "m must be a half-odd integer; numerator {numerator} is even"
            )));
        }
        Ok(Self { numerator })
    }

    pub fn numerator(self) -> i32 {
        self.numerator
    }

    pub fn value(self) -> f64 {
        self.numerator as f64 / 2.0
    }

    pub fn abs(self) -> Self {
        Self {
            numerator: self.numerator.abs(),
        }
    }

    pub fn is_positive(self) -> bool {
        self.numerator > 0
    }
}

impl Neg for AzimuthalNumber {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            numerator: -self.numerator,
        }
    }
}

impl fmt::Display for AzimuthalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.numerator)
    }
}

impl FromStr for AzimuthalNumber {
    type Err = Error;

    /// Accepts only "k/2", "+k/2" or "-k/2" with k odd.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "m must be a half-odd integer written as ±k/2 with k odd, got '{s}'"
            ))
        };
        let t = s.trim();
        let (num, den) = t.split_once('/').ok_or_else(bad)?;
        if den.trim() != "2" {
            return Err(bad());
        }
        let num = num.trim();
        let digits = num.strip_prefix(['+', '-']).unwrap_or(num);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: i32 = num.parse().map_err(|_| bad())?;
        Self::new(n).map_err(|_| bad())
    }
}

/// Two real radial components at one ρ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor2 {
    pub phi1: f64,
    pub phi2: f64,
}

impl Spinor2 {
    pub fn new(phi1: f64, phi2: f64) -> Self {
        Self { phi1, phi2 }
    }

    /// (s + d, s − d)
    pub fn from_sym_anti(sym: f64, anti: f64) -> Self {
        Self::new(sym + anti, sym - anti)
    }

    /// ((φ₁ + φ₂)/2, (φ₁ − φ₂)/2)
    pub fn sym_anti(&self) -> (f64, f64) {
        ((self.phi1 + self.phi2) / 2.0, (self.phi1 - self.phi2) / 2.0)
    }

    pub fn swapped(self) -> Self {
        Self::new(self.phi2, self.phi1)
    }

    /// Swap the components when m < 0.
    pub fn oriented(self, m: AzimuthalNumber) -> Self {
        if m.is_positive() {
            self
        } else {
            self.swapped()
        }
    }

    pub fn norm(&self) -> f64 {
        self.phi1.hypot(self.phi2)
    }

    pub fn max_abs(&self) -> f64 {
        self.phi1.abs().max(self.phi2.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.phi1.is_finite() && self.phi2.is_finite()
    }
}

/// Bounded-combination coefficients and the branch crossover.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConicParams {
    pub m: AzimuthalNumber,
    pub a1: f64,
    pub a2: f64,
    pub rho_switch: f64,
}

/// Which basis solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    F1,
    F2,
}

/// Arithmetic used on the cancelling series branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Standard,
    /// Double-double series and coefficients, about 31 digits.
    Wide,
}

#[derive(Clone, Copy, Debug)]
pub struct ConicConfig {
    pub rho_switch: f64,
    pub precision: Precision,
    pub series_tol: f64,
    pub fit_samples: usize,
    pub fit_basis: FarFieldBasis,
}

impl ConicConfig {
    pub fn standard() -> Self {
        Self {
            rho_switch: 7.0,
            precision: Precision::Standard,
            series_tol: 1e-16,
            fit_samples: 64,
            fit_basis: FarFieldBasis::Expansion,
        }
    }

    pub fn wide() -> Self {
        Self {
            rho_switch: 9.0,
            precision: Precision::Wide,
            series_tol: 1e-30,
            ..Self::standard()
        }
    }

    /// Wide when the environment variable `CONIC_WIDE` is `1`.
    pub fn from_env() -> Self {
        match std::env::var("CONIC_WIDE") {
            Ok(v) if v.trim() == "1" => Self::wide(),
            _ => Self::standard(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(4.0..=9.0).contains(&self.rho_switch) {
            return Err(Error::Domain(format!(
                "rho_switch must lie in [4, 9], got {}",
                self.rho_switch
            )));
        }
        if !(self.series_tol > 0.0) {
            return Err(Error::Domain("series tolerance must be positive".into()));
        }
        if self.fit_samples < 8 {
            return Err(Error::Domain("far-field fit needs at least 8 samples".into()));
        }
        Ok(())
    }

    /// Decimal digits the series branch can deliver before cancellation.
    fn available_digits(&self) -> f64 {
        let (format, coeff) = match self.precision {
            Precision::Standard => (f64::digits(), COEFF_DIGITS_STANDARD),
            Precision::Wide => (DoubleDouble::digits(), COEFF_DIGITS_WIDE),
        };
        format.min(coeff).min(-self.series_tol.log10())
    }
}

impl Default for ConicConfig {
    fn default() -> Self {
        Self::standard()
    }
}

/// Digits of the coefficients A_j as verified against the wide evaluation.
const COEFF_DIGITS_STANDARD: f64 = 14.0;
const COEFF_DIGITS_WIDE: f64 = 29.0;
/// Required excess of available digits over the cancellation loss.
const REQUIRED_MARGIN_DIGITS: f64 = 6.0;
/// Branch disagreement that signals precision exhaustion.
const OVERLAP_LIMIT: f64 = 1e-4;
const OVERLAP_SAMPLES: usize = 41;

fn require_positive(m: AzimuthalNumber) -> Result<()> {
    if m.is_positive() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "basis functions and coefficients are defined for m > 0, got {m}"
        )))
    }
}

fn require_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("rho must be finite and >= 0, got {rho}")))
    }
}

/// (φ₁, φ₂) of ℱ₁ or ℱ₂ for m = p/2 > 0, summed in `T`.
fn basis_in<T: Real>(p: i32, which: Basis, rho: T, tol: f64) -> Result<[T; 2]> {
    let p64 = p as i64;
    let sixth = |n: i64| T::from_ratio(n, 6);
    let z = rho.powi(6) / T::from(1296.0);
    let (lead, next) = match which {
        Basis::F1 => {
            let f = hyper0f3_in([sixth(2), sixth(3 + p64), sixth(5 + p64)], z, tol)?;
            let g = hyper0f3_in([sixth(8), sixth(9 + p64), sixth(5 + p64)], z, tol)?;
            let phi1 = rho.powi((p - 1) / 2) * f.value;
            let phi2 = rho.powi((p + 5) / 2) / T::from(6.0 + 2.0 * p as f64) * g.value;
            (phi1, phi2)
        }
        Basis::F2 => {
            let f = hyper0f3_in([sixth(10), sixth(9 + p64), sixth(7 + p64)], z, tol)?;
            let g = hyper0f3_in([sixth(4), sixth(3 + p64), sixth(7 + p64)], z, tol)?;
            let phi1 = rho.powi((p + 7) / 2) / T::from(12.0 + 4.0 * p as f64) * f.value;
            let phi2 = rho.powi((p + 1) / 2) * g.value;
            (phi1, phi2)
        }
    };
    Ok([lead, next])
}

/// ℱ₁(ρ; m), regular at the origin with φ₁ ~ ρ^{m−1/2}.
pub fn basis_f1(m: AzimuthalNumber, rho: f64, tol: f64) -> Result<Spinor2> {
    require_positive(m)?;
    require_rho(rho)?;
    let [a, b] = basis_in(m.numerator(), Basis::F1, rho, tol)?;
    Ok(Spinor2::new(a, b))
}

/// ℱ₂(ρ; m), regular at the origin with φ₂ ~ ρ^{m+1/2}.
pub fn basis_f2(m: AzimuthalNumber, rho: f64, tol: f64) -> Result<Spinor2> {
    require_positive(m)?;
    require_rho(rho)?;
    let [a, b] = basis_in(m.numerator(), Basis::F2, rho, tol)?;
    Ok(Spinor2::new(a, b))
}

/// Coefficient of ℱ_j in the bounded combination, normalized so that
/// ℱ_c ~ ρ^{-3/4} cos(z − π(m/3 + 1/4)) (1, −1):
///
/// A_j = −(−1)^j 2π^{3/2} 6^{−(s+2m)/3} / (3 Γ(1/2 + m/3) Γ(1/2 + s/6) Γ(1 + (2m+s)/6)),
/// s = (−1)^j.
pub fn coeff_a(m: AzimuthalNumber, j: u8) -> Result<f64> {
    require_positive(m)?;
    let (s, sign) = coeff_sign(j)?;
    let p = m.numerator();
    let g = gamma_fn((3 + p) as f64 / 6.0)?
        * gamma_fn((3 + s) as f64 / 6.0)?
        * gamma_fn((6 + p + s) as f64 / 6.0)?;
    let pow6 = 6f64.powf(-(s + p) as f64 / 3.0);
    Ok(sign * 2.0 * PI * PI.sqrt() * pow6 / (3.0 * g))
}

/// [`coeff_a`] in double-double arithmetic.
pub fn coeff_a_wide(m: AzimuthalNumber, j: u8) -> Result<DoubleDouble> {
    require_positive(m)?;
    let (s, sign) = coeff_sign(j)?;
    let p = m.numerator() as i64;
    let s = s as i64;
    let g = gamma_wide(DoubleDouble::from_ratio(3 + p, 6))?
        * gamma_wide(DoubleDouble::from_ratio(3 + s, 6))?
        * gamma_wide(DoubleDouble::from_ratio(6 + p + s, 6))?;
    let pow6 = (DoubleDouble::from_f64(6.0).ln() * DoubleDouble::from_ratio(-(s + p), 3)).exp();
    let pi = DoubleDouble::PI;
    let num = DoubleDouble::from_f64(2.0 * sign) * pi * pi.sqrt() * pow6;
    Ok(num / (DoubleDouble::from_f64(3.0) * g))
}

fn coeff_sign(j: u8) -> Result<(i32, f64)> {
    match j {
        1 => Ok((-1, 1.0)),
        2 => Ok((1, -1.0)),
        _ => Err(Error::Domain(format!("coefficient index must be 1 or 2, got {j}"))),
    }
}

/// Series value of ℱ_c with its cancellation bookkeeping.
#[derive(Clone, Copy, Debug)]
pub struct SeriesEval {
    pub value: Spinor2,
    /// log10 of max|A_jℱ_j| over max(|ℱ_c|, ρ^{-3/4}).
    pub loss_digits: f64,
    pub available_digits: f64,
}

impl SeriesEval {
    pub fn margin_digits(&self) -> f64 {
        self.available_digits - self.loss_digits
    }
}

/// ℱ_c(m; ρ) for one m, with both evaluation branches prepared.
#[derive(Clone, Debug)]
pub struct ConicFunction {
    params: ConicParams,
    config: ConicConfig,
    a_wide: [DoubleDouble; 2],
    expansion: AsymptoticExpansion,
    fit: FarFieldFit,
    far: FarField,
    overlap_error: f64,
}

impl ConicFunction {
    /// Computes the coefficients, fits the far field on
    /// [rho_switch − 2, rho_switch] and checks the branches agree on
    /// [rho_switch − 1, rho_switch].
    pub fn new(m: AzimuthalNumber, config: &ConicConfig) -> Result<Self> {
        config.validate()?;
        let mp = m.abs();
        let params = ConicParams {
            m,
            a1: coeff_a(mp, 1)?,
            a2: coeff_a(mp, 2)?,
            rho_switch: config.rho_switch,
        };
        let a_wide = [coeff_a_wide(mp, 1)?, coeff_a_wide(mp, 2)?];
        let mut this = Self {
            params,
            config: *config,
            a_wide,
            expansion: AsymptoticExpansion::new(mp),
            fit: FarFieldFit {
                far_field: FarField::leading(0.0, 0.0, 0.0, 0.0),
                condition: 0.0,
                rms_residual: 0.0,
                max_residual: 0.0,
            },
            far: FarField::leading(0.0, 0.0, 0.0, 0.0),
            overlap_error: 0.0,
        };

        let rs = config.rho_switch;
        let (z0, z1) = (z_of_rho(rs - 2.0), z_of_rho(rs));
        let n = config.fit_samples;
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let rho = rho_of_z(z0 + (z1 - z0) * i as f64 / (n - 1) as f64);
            samples.push((rho, this.series_positive(rho)?.value));
        }
        let opts = FitOptions {
            basis: config.fit_basis,
            rel_noise: 10f64.powf(-config.available_digits()),
            ..FitOptions::default()
        };
        this.fit = extract_far_field(&samples, mp, &opts)?;
        this.far = this.fit.far_field.bounded();

        let mut worst = 0.0f64;
        for i in 0..OVERLAP_SAMPLES {
            let rho = rs - 1.0 + i as f64 / (OVERLAP_SAMPLES - 1) as f64;
            let a = this.series_positive(rho)?.value;
            let b = this.expansion.eval(&this.far, rho);
            worst = worst.max((a.phi1 - b.phi1).abs()).max((a.phi2 - b.phi2).abs());
        }
        this.overlap_error = worst;
        if !(worst <= OVERLAP_LIMIT) {
            return Err(Error::Consistency(format!(
                "series and far-field branches differ by {worst:.3e} on [{}, {rs}]; \
                 raise the precision or lower rho_switch",
                rs - 1.0
            )));
        }
        Ok(this)
    }

    pub fn params(&self) -> &ConicParams {
        &self.params
    }

    pub fn config(&self) -> &ConicConfig {
        &self.config
    }

    pub fn m(&self) -> AzimuthalNumber {
        self.params.m
    }

    /// Bounded far field (A₊ = 0), in the m > 0 orientation.
    pub fn far_field(&self) -> &FarField {
        &self.far
    }

    /// The unconstrained fit, including the fitted A₊.
    pub fn fit(&self) -> &FarFieldFit {
        &self.fit
    }

    /// Largest branch disagreement found on [rho_switch − 1, rho_switch].
    pub fn overlap_error(&self) -> f64 {
        self.overlap_error
    }

    /// ℱ_c(m; ρ): series up to rho_switch, far-field form beyond.
    pub fn eval(&self, rho: f64) -> Result<Spinor2> {
        require_rho(rho)?;
        if rho <= self.params.rho_switch {
            self.eval_series(rho)
        } else {
            self.eval_far(rho)
        }
    }

    /// A₁ℱ₁ + A₂ℱ₂ by series at any ρ ≤ 9; fails once fewer than six
    /// digits would survive the cancellation.
    pub fn eval_series(&self, rho: f64) -> Result<Spinor2> {
        Ok(self.series_diagnostics(rho)?.value)
    }

    pub fn series_diagnostics(&self, rho: f64) -> Result<SeriesEval> {
        require_rho(rho)?;
        let mut s = self.series_positive(rho)?;
        s.value = s.value.oriented(self.params.m);
        Ok(s)
    }

    /// The bounded far-field form at ρ > 0.
    pub fn eval_far(&self, rho: f64) -> Result<Spinor2> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("far-field branch needs rho > 0, got {rho}")));
        }
        Ok(self.expansion.eval(&self.far, rho).oriented(self.params.m))
    }

    /// Ψ = e^{imθ}(φ₁e^{−iθ/2}, φ₂e^{iθ/2}) = (φ₁e^{i(m−1/2)θ}, φ₂e^{i(m+1/2)θ}).
    pub fn wavefunction(&self, rho: f64, theta: f64) -> Result<[Complex64; 2]> {
        let s = self.eval(rho)?;
        Ok(spinor_phases(self.params.m, s, theta))
    }

    fn series_positive(&self, rho: f64) -> Result<SeriesEval> {
        let p = self.params.m.abs().numerator();
        let tol = self.config.series_tol;
        let (value, big) = match self.config.precision {
            Precision::Standard => {
                let f1 = basis_in(p, Basis::F1, rho, tol)?;
                let f2 = basis_in(p, Basis::F2, rho, tol)?;
                combine(self.params.a1, self.params.a2, f1, f2)
            }
            Precision::Wide => {
                let r = DoubleDouble::from_f64(rho);
                let f1 = basis_in(p, Basis::F1, r, tol)?;
                let f2 = basis_in(p, Basis::F2, r, tol)?;
                combine(self.a_wide[0], self.a_wide[1], f1, f2)
            }
        };
        let reference = value.max_abs().max(rho.powf(-0.75));
        let loss_digits = (big / reference).log10().max(0.0);
        let available_digits = self.config.available_digits();
        let eval = SeriesEval {
            value,
            loss_digits,
            available_digits,
        };
        if eval.margin_digits() < REQUIRED_MARGIN_DIGITS {
            return Err(Error::Consistency(format!(
                "series branch at rho = {rho} cancels {loss_digits:.1} of {available_digits:.1} digits, \
                 leaving fewer than {REQUIRED_MARGIN_DIGITS}"
            )));
        }
        Ok(eval)
    }
}

fn combine<T: Real>(a1: T, a2: T, f1: [T; 2], f2: [T; 2]) -> (Spinor2, f64) {
    let t = [a1 * f1[0], a1 * f1[1], a2 * f2[0], a2 * f2[1]];
    let big = t.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
    let value = Spinor2::new((t[0] + t[2]).to_f64(), (t[1] + t[3]).to_f64());
    (value, big)
}

fn spinor_phases(m: AzimuthalNumber, s: Spinor2, theta: f64) -> [Complex64; 2] {
    // m ∓ 1/2 are integers
    let n_lo = ((m.numerator() - 1) / 2) as f64;
    let n_hi = n_lo + 1.0;
    [
        Complex64::from_polar(s.phi1, n_lo * theta),
        Complex64::from_polar(s.phi2, n_hi * theta),
    ]
}

/// ℱ_c(m; ρ) with the given series tolerance and otherwise default settings.
/// Builds the far-field calibration on every call; use [`ConicFunction`] to
/// evaluate many points.
pub fn conic_fc(m: AzimuthalNumber, rho: f64, tol: f64) -> Result<Spinor2> {
    let config = ConicConfig {
        series_tol: tol,
        ..ConicConfig::from_env()
    };
    ConicFunction::new(m, &config)?.eval(rho)
}

/// Full spinor Ψ(ρ, θ; m) with default settings.
pub fn wavefunction(m: AzimuthalNumber, rho: f64, theta: f64) -> Result<[Complex64; 2]> {
    ConicFunction::new(m, &ConicConfig::from_env())?.wavefunction(rho, theta)
}
