//! Analytic equations of state of the dilute 2D Bose gas.
//!
//! Everything here is dimensionless. Energies per particle are reported as
//! ε = (E/N)·m/(2πħ²n) and chemical potentials as μ̃ = μ·m/(4πħ²n), so the
//! Schick mean-field result reads ε = μ̃ = 1/L with L = |ln na²|.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::reference::ReferenceRow;
use crate::root::{newton_bisect, RootOptions};
use crate::specfun::{gamma_upper_zero_scaled, SpecfunError, EULER_GAMMA};

/// Ratio a/r₀ between the s-wave scattering length and the dipolar length.
pub const DIPOLAR_SCATTERING_RATIO: f64 = 3.17222;

/// Above this nr₀² the dipolar conversion is outside its dilute regime.
pub const DIPOLAR_DILUTE_LIMIT: f64 = 0.1;

const RESIDUAL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EosError {
    #[error("{what} must be positive, got {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("{what}: L = {l} is outside the regime of validity ({requirement})")]
    OutOfRegime { what: &'static str, l: f64, requirement: &'static str },
    #[error("{theory} is valid for ln L in {window}, got ln L = {ln_l}")]
    Validity { theory: Theory, window: Validity, ln_l: f64 },
    #[error("1/u + ln u = {rhs} has no solution (right-hand side below 1): density too high")]
    NoSolution { rhs: f64 },
    #[error("{what} did not converge in {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },
    #[error("need at least 3 rows inside the fit window, found {found}")]
    InsufficientData { found: usize },
    #[error(transparent)]
    Special(#[from] SpecfunError),
}

/// The gas parameter na², stored as its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GasParameter {
    log_na2: f64,
}

impl GasParameter {
    pub fn from_log_na2(log_na2: f64) -> Result<Self, EosError> {
        if !(log_na2 < 0.0) || !log_na2.is_finite() {
            return Err(EosError::Domain { what: "-ln(na^2)", value: -log_na2 });
        }
        Ok(Self { log_na2 })
    }

    pub fn from_na2(na2: f64) -> Result<Self, EosError> {
        if !(na2 > 0.0) {
            return Err(EosError::Domain { what: "na^2", value: na2 });
        }
        Self::from_log_na2(na2.ln())
    }

    /// Builds the gas parameter from L = |ln na²|.
    pub fn from_l(l: f64) -> Result<Self, EosError> {
        Self::from_log_na2(-l)
    }

    /// Converts a dipolar density nr₀² using a = 3.17222·r₀.
    ///
    /// Densities above [`DIPOLAR_DILUTE_LIMIT`] are accepted with a logged
    /// warning.
    pub fn from_density_dipoles(n_r02: f64) -> Result<Self, EosError> {
        if !(n_r02 > 0.0) || !n_r02.is_finite() {
            return Err(EosError::Domain { what: "n r0^2", value: n_r02 });
        }
        if n_r02 >= DIPOLAR_DILUTE_LIMIT {
            log::warn!("n r0^2 = {n_r02} is outside the dilute regime of the dipolar conversion");
        }
        Self::from_log_na2(n_r02.ln() + 2.0 * DIPOLAR_SCATTERING_RATIO.ln())
    }

    pub fn log_na2(self) -> f64 {
        self.log_na2
    }

    /// L = |ln na²|.
    pub fn l(self) -> f64 {
        -self.log_na2
    }

    /// ln L, the abscissa of the beyond-mean-field plot.
    pub fn ln_l(self) -> f64 {
        self.l().ln()
    }
}

/// Mean-field energy of Schick: ε = 1/L.
pub fn energy_mf_schick(g: GasParameter) -> f64 {
    1.0 / g.l()
}

/// Energy from integrating the Schick chemical potential:
/// ε = 2·e^{2L}·Γ(0, 2L).
pub fn energy_mf_integrated(g: GasParameter) -> Result<f64, EosError> {
    let l = g.l();
    if l <= 0.5 {
        return Err(EosError::OutOfRegime { what: "integrated mean-field energy", l, requirement: "L > 1/2" });
    }
    Ok(2.0 * gamma_upper_zero_scaled(2.0 * l)?)
}

/// Large-L expansion ε = 1/(L + 1/2 − 1/(4L)).
pub fn energy_mf_expansion(g: GasParameter) -> Result<f64, EosError> {
    let l = g.l();
    if l <= 1.0 {
        return Err(EosError::OutOfRegime { what: "mean-field expansion", l, requirement: "L > 1" });
    }
    Ok(1.0 / (l + 0.5 - 0.25 / l))
}

/// Window in ln L where a literature expression applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub ln_l_min: Option<f64>,
    pub ln_l_max: Option<f64>,
}

impl Validity {
    pub const UNBOUNDED: Validity = Validity { ln_l_min: None, ln_l_max: None };

    pub fn contains(&self, ln_l: f64) -> bool {
        self.ln_l_min.map_or(true, |lo| ln_l > lo) && self.ln_l_max.map_or(true, |hi| ln_l < hi)
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_bound = |b: Option<f64>, inf: &str| b.map_or(inf.to_string(), |v| v.to_string());
        write!(f, "({}, {})", fmt_bound(self.ln_l_min, "-inf"), fmt_bound(self.ln_l_max, "inf"))
    }
}

/// Literature equations of state, written as ε = 1/(L + D(L)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theory {
    Schick,
    Popov,
    Lozovik,
    Hines,
    Fisher,
    Kolomeisky,
    Ovchinnikov,
    ChernyMoraPricoupenko,
    Andersen,
    PilatiFit,
}

impl Theory {
    pub const ALL: [Theory; 10] = [
        Theory::Schick,
        Theory::Popov,
        Theory::Lozovik,
        Theory::Hines,
        Theory::Fisher,
        Theory::Kolomeisky,
        Theory::Ovchinnikov,
        Theory::ChernyMoraPricoupenko,
        Theory::Andersen,
        Theory::PilatiFit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theory::Schick => "schick",
            Theory::Popov => "popov",
            Theory::Lozovik => "lozovik",
            Theory::Hines => "hines",
            Theory::Fisher => "fisher",
            Theory::Kolomeisky => "kolomeisky",
            Theory::Ovchinnikov => "ovchinnikov",
            Theory::ChernyMoraPricoupenko => "cherny_mora_pricoupenko",
            Theory::Andersen => "andersen",
            Theory::PilatiFit => "pilati_fit",
        }
    }

    pub fn spec(self) -> TheorySpec {
        let validity = match self {
            // fit to hard-disk data, only meaningful where it was fitted
            Theory::PilatiFit => Validity { ln_l_min: Some(1.5), ln_l_max: Some(2.8) },
            _ => Validity::UNBOUNDED,
        };
        TheorySpec { theory: self, validity }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theory::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown theory '{s}'"))
    }
}

/// One catalogued expression with its validity window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheorySpec {
    pub theory: Theory,
    pub validity: Validity,
}

impl TheorySpec {
    /// The denominator correction D(L).
    pub fn correction(&self, g: GasParameter) -> Result<f64, EosError> {
        theory_correction(*self, g)
    }

    /// ε = 1/(L + D(L)).
    pub fn energy(&self, g: GasParameter) -> Result<f64, EosError> {
        Ok(1.0 / (g.l() + self.correction(g)?))
    }
}

/// Denominator correction D(L) of a catalogued expression.
pub fn theory_correction(t: TheorySpec, g: GasParameter) -> Result<f64, EosError> {
    let l = g.l();
    let ln_l = l.ln();
    if !t.validity.contains(ln_l) {
        return Err(EosError::Validity { theory: t.theory, window: t.validity, ln_l });
    }
    let ln_4pi = (4.0 * PI).ln();
    let d = match t.theory {
        Theory::Schick => 0.0,
        Theory::Popov | Theory::Fisher | Theory::Andersen => ln_l - ln_4pi - 0.5,
        Theory::Lozovik => ln_l - ln_4pi + 0.5,
        Theory::Hines => {
            let arg = l + PI.ln();
            if arg <= 1.0 {
                return Err(EosError::OutOfRegime { what: "hines", l, requirement: "L + ln(pi) > 1" });
            }
            arg.ln() - (2.0 * PI.powi(3)).ln() - 2.0 * EULER_GAMMA + 1.5
        }
        Theory::Kolomeisky => {
            let arg = l - ln_4pi;
            if arg <= 0.0 {
                return Err(EosError::OutOfRegime { what: "kolomeisky", l, requirement: "L > ln(4 pi)" });
            }
            arg.ln() - ln_4pi
        }
        Theory::Ovchinnikov => ln_l,
        Theory::ChernyMoraPricoupenko => ln_l - PI.ln() - 2.0 * EULER_GAMMA - 0.5,
        Theory::PilatiFit => 0.86 * ln_l - 2.26,
    };
    Ok(d)
}

/// Beyond-mean-field ordinate 1/ε − L.
pub fn fig1_ordinate(eps: f64, g: GasParameter) -> Result<f64, EosError> {
    if !(eps > 0.0) {
        return Err(EosError::Domain { what: "energy", value: eps });
    }
    Ok(1.0 / eps - g.l())
}

/// Right-hand side −ln(π na²) − 2γ of the in-medium amplitude equation.
fn cherny_rhs(g: GasParameter) -> f64 {
    g.l() - PI.ln() - 2.0 * EULER_GAMMA
}

/// In-medium scattering amplitude: the root u ∈ (0, 1] of
/// 1/u + ln u = −ln(π na²) − 2γ.
pub fn cherny_u(g: GasParameter) -> Result<f64, EosError> {
    let rhs = cherny_rhs(g);
    // u = 1 is the minimum of 1/u + ln u; it solves the equation to within
    // the residual tolerance right at the edge
    if (rhs - 1.0).abs() <= RESIDUAL_TOL {
        return Ok(1.0);
    }
    if rhs < 1.0 {
        return Err(EosError::NoSolution { rhs });
    }
    // 1/u + ln u is decreasing on (0, 1]; at lo = 1/(2 rhs + 1) it exceeds rhs.
    let lo = 1.0 / (2.0 * rhs + 1.0);
    let f = |u: f64| (1.0 / u + u.ln() - rhs, (u - 1.0) / (u * u));
    let root = newton_bisect(f, lo, 1.0, 1.0 / rhs, RootOptions { residual_tol: RESIDUAL_TOL, max_iter: MAX_ITER })
        .map_err(|_| EosError::Convergence { what: "in-medium amplitude", iterations: MAX_ITER })?;
    Ok(root.x)
}

/// ε = u + u²/2 − c₃·u³.
pub fn cherny_energy(u: f64, c3: f64) -> f64 {
    u + 0.5 * u * u - c3 * u * u * u
}

/// Rows used by [`fit_c3`]: those with na² at or below `max_na2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub max_na2: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { max_na2: 1e-6 }
    }
}

impl FitWindow {
    pub fn contains(&self, g: GasParameter) -> bool {
        g.log_na2() <= self.max_na2.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub c3: f64,
    pub c3_err: f64,
    pub chi2_per_dof: f64,
    pub rows_used: usize,
}

/// χ² fit of the cubic coefficient in ε = u + u²/2 − c₃u³.
///
/// The model is linear in c₃, so the minimum and its curvature are closed
/// form.
pub fn fit_c3(rows: &[ReferenceRow], window: FitWindow) -> Result<FitResult, EosError> {
    let mut points = Vec::new();
    for row in rows {
        let Ok(g) = row.gas() else { continue };
        if !window.contains(g) {
            continue;
        }
        let Ok(u) = cherny_u(g) else { continue };
        points.push((u, row.epsilon(), row.epsilon_err()));
    }
    if points.len() < 3 {
        return Err(EosError::InsufficientData { found: points.len() });
    }
    // residual_i = z_i + c3·u_i³ with z_i = ε_i − u_i − u_i²/2
    let (mut s_zb, mut s_bb) = (0.0, 0.0);
    for &(u, eps, sigma) in &points {
        let b = u * u * u;
        let z = eps - u - 0.5 * u * u;
        let w = 1.0 / (sigma * sigma);
        s_zb += w * z * b;
        s_bb += w * b * b;
    }
    let c3 = -s_zb / s_bb;
    let chi2: f64 = points
        .iter()
        .map(|&(u, eps, sigma)| ((eps - cherny_energy(u, c3)) / sigma).powi(2))
        .sum();
    Ok(FitResult {
        c3,
        c3_err: 1.0 / s_bb.sqrt(),
        chi2_per_dof: chi2 / (points.len() - 1) as f64,
        rows_used: points.len(),
    })
}

/// Self-consistent solution y = μ̃ of y·(L + ln C₁ − ln 4π − 1 − ln y) = 1,
/// by damped fixed-point iteration.
pub fn popov_solve(g: GasParameter, c1_popov: f64) -> Result<f64, EosError> {
    if !(c1_popov > 0.0) {
        return Err(EosError::Domain { what: "C1", value: c1_popov });
    }
    let l = g.l();
    let bracket = l + c1_popov.ln() - (4.0 * PI).ln() - 1.0;
    if bracket <= 1.0 {
        return Err(EosError::OutOfRegime { what: "popov", l, requirement: "L + ln C1 - ln 4pi - 1 > 1" });
    }
    const DAMPING: f64 = 0.5;
    let mut y = 1.0 / bracket;
    for _ in 0..MAX_ITER {
        let next = 1.0 / (bracket - y.ln());
        y = DAMPING * next + (1.0 - DAMPING) * y;
        if (y * (bracket - y.ln()) - 1.0).abs() <= RESIDUAL_TOL {
            return Ok(y);
        }
    }
    Err(EosError::Convergence { what: "popov", iterations: MAX_ITER })
}

/// Iterated Popov chemical potential
/// μ̃ = 1/(L + ln L − ln 4π + ln C₁ − 1).
pub fn popov_closed_form(g: GasParameter, c1_popov: f64) -> Result<f64, EosError> {
    if !(c1_popov > 0.0) {
        return Err(EosError::Domain { what: "C1", value: c1_popov });
    }
    let l = g.l();
    let denom = l + l.ln() - (4.0 * PI).ln() + c1_popov.ln() - 1.0;
    if denom <= 0.0 {
        return Err(EosError::OutOfRegime { what: "popov closed form", l, requirement: "positive denominator" });
    }
    Ok(1.0 / denom)
}

/// Constants of the universal expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniversalConstants {
    pub c1_mu: f64,
    pub c2_mu: f64,
    /// One-σ uncertainty of `c2_mu`, used for bands only.
    pub c2_mu_err: f64,
    pub c1_e: f64,
    pub c2_e: f64,
    pub euler_gamma: f64,
}

impl Default for UniversalConstants {
    fn default() -> Self {
        Self::with_c2_mu(-0.3)
    }
}

impl UniversalConstants {
    pub fn with_c2_mu(c2_mu: f64) -> Self {
        let c1_mu = -PI.ln() - 2.0 * EULER_GAMMA - 1.0;
        Self {
            c1_mu,
            c2_mu,
            c2_mu_err: 0.1,
            c1_e: c1_mu + 0.5,
            c2_e: c2_mu + 0.25,
            euler_gamma: EULER_GAMMA,
        }
    }

    /// Constants with `c2_mu` shifted by `sigmas` standard deviations.
    pub fn shifted(&self, sigmas: f64) -> Self {
        let mut k = Self::with_c2_mu(self.c2_mu + sigmas * self.c2_mu_err);
        k.c2_mu_err = self.c2_mu_err;
        k
    }
}

fn require_universal(what: &'static str, l: f64) -> Result<(), EosError> {
    if l <= std::f64::consts::E {
        return Err(EosError::OutOfRegime { what, l, requirement: "L > e" });
    }
    Ok(())
}

/// Denominator correction of the universal energy:
/// ln L + C₁ᴱ + (ln L + C₂ᴱ)/L.
pub fn universal_energy_correction(g: GasParameter, k: &UniversalConstants) -> Result<f64, EosError> {
    let l = g.l();
    require_universal("universal energy", l)?;
    let ln_l = l.ln();
    Ok(ln_l + k.c1_e + (ln_l + k.c2_e) / l)
}

/// μ̃ = 1/(L + ln L + C₁ᵘ + (ln L + C₂ᵘ)/L).
pub fn universal_mu(g: GasParameter, k: &UniversalConstants) -> Result<f64, EosError> {
    let l = g.l();
    require_universal("universal chemical potential", l)?;
    let ln_l = l.ln();
    Ok(1.0 / (l + ln_l + k.c1_mu + (ln_l + k.c2_mu) / l))
}

/// ε = 1/(L + ln L + C₁ᴱ + (ln L + C₂ᴱ)/L).
pub fn universal_energy(g: GasParameter, k: &UniversalConstants) -> Result<f64, EosError> {
    Ok(1.0 / (g.l() + universal_energy_correction(g, k)?))
}

/// log₁₀(na²) of the density where ln L is m times ln 4π:
/// na² ≈ exp(−(4π)^m).
pub fn characteristic_density(m: f64) -> Result<f64, EosError> {
    if !(m > 0.0) {
        return Err(EosError::Domain { what: "m", value: m });
    }
    Ok(-(4.0 * PI).powf(m) / std::f64::consts::LN_10)
}
