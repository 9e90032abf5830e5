//! Harmonically trapped 2D gas in the local density approximation, and the
//! breathing-mode frequency from the compressional sum rule.
//!
//! Units: ħ = m = 1, so the oscillator length is a_ho = ω^{−1/2}.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::eos::{GasParameter, UniversalConstants, DIPOLAR_SCATTERING_RATIO};
use crate::quad::integrate_breakpoints;
use crate::root::{bisect, newton_bisect, RootOptions};

const QUAD_REL_TOL: f64 = 1e-14;
const NORMALIZATION_TOL: f64 = 1e-8;
/// Default relative step in ω² for the sum-rule derivative.
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-4;
const DERIVATIVE_CONSISTENCY: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrapError {
    #[error("invalid trap configuration: {0}")]
    Config(String),
    #[error("equation of state {eos} is not monotone (or not defined) at mu a^2 = {mu_a2}")]
    Model { eos: EosChoice, mu_a2: f64 },
    #[error("normalization solve failed: {0}")]
    Numeric(String),
    #[error("sum-rule derivative inconsistent between steps: relative gap {gap:.3e}")]
    Derivative { gap: f64 },
}

/// Bulk equation of state used locally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EosChoice {
    /// μ = g·n with a density-independent coupling.
    MfLinear { coupling: f64 },
    /// μ = 4πn/|ln na²|.
    MfSchick,
    /// μ = 4πn·μ̃ with μ̃ from the universal beyond-mean-field expansion.
    Universal,
}

impl EosChoice {
    pub fn name(&self) -> &'static str {
        match self {
            EosChoice::MfLinear { .. } => "mf_linear",
            EosChoice::MfSchick => "mf_schick",
            EosChoice::Universal => "universal",
        }
    }

    /// Denominator D(L) with μ a² = 4π·na²/D, for the logarithmic forms.
    fn denominator(&self, l: f64) -> Option<(f64, f64)> {
        match self {
            EosChoice::MfLinear { .. } => None,
            EosChoice::MfSchick => (l > 0.0).then_some((l, 1.0)),
            EosChoice::Universal => {
                if l <= E {
                    return None;
                }
                let k = UniversalConstants::default();
                let ln_l = l.ln();
                let d = l + ln_l + k.c1_mu + (ln_l + k.c2_mu) / l;
                let dd = 1.0 + 1.0 / l + (1.0 - ln_l - k.c2_mu) / (l * l);
                (d > 0.0).then_some((d, dd))
            }
        }
    }

    /// Local chemical potential at density `n` for scattering length `a`.
    pub fn chemical_potential(&self, n: f64, a: f64) -> Result<f64, TrapError> {
        if n <= 0.0 {
            return Ok(0.0);
        }
        match *self {
            EosChoice::MfLinear { coupling } => Ok(coupling * n),
            _ => {
                let na2 = n * a * a;
                let l = -na2.ln();
                let (d, _) = self.denominator(l).ok_or(TrapError::Model { eos: *self, mu_a2: f64::NAN })?;
                Ok(4.0 * PI * na2 / d / (a * a))
            }
        }
    }

    /// Inverts μ(n): the density at which the local chemical potential is `mu`.
    pub fn density(&self, mu: f64, a: f64) -> Result<f64, TrapError> {
        if mu <= 0.0 {
            return Ok(0.0);
        }
        match *self {
            EosChoice::MfLinear { coupling } => Ok(mu / coupling),
            _ => {
                let target = (mu * a * a).ln();
                // ln(μa²) = ln 4π + s − ln D(−s) with s = ln na², increasing in s
                let s_max = match self {
                    EosChoice::Universal => -E * (1.0 + 1e-12),
                    _ => -1e-9,
                };
                let residual = |s: f64| -> Option<(f64, f64)> {
                    let (d, dd) = self.denominator(-s)?;
                    Some(((4.0 * PI).ln() + s - d.ln() - target, 1.0 + dd / d))
                };
                let model_err = TrapError::Model { eos: *self, mu_a2: mu * a * a };
                let (f_hi, _) = residual(s_max).ok_or(model_err.clone())?;
                if f_hi < 0.0 {
                    return Err(model_err);
                }
                let mut s_lo = (target - (4.0 * PI).ln()).min(s_max - 1.0);
                let mut expand = 1.0;
                while residual(s_lo).ok_or(model_err.clone())?.0 > 0.0 {
                    s_lo -= expand;
                    expand *= 2.0;
                    if !s_lo.is_finite() {
                        return Err(model_err);
                    }
                }
                let f = |s: f64| residual(s).expect("inside bracket");
                let root = newton_bisect(f, s_lo, s_max, 0.5 * (s_lo + s_max), RootOptions { residual_tol: 1e-15, max_iter: 200 })
                    .map_err(|e| TrapError::Numeric(e.to_string()))?;
                Ok(root.x.exp() / (a * a))
            }
        }
    }
}

impl fmt::Display for EosChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EosChoice {
    type Err = String;

    /// `mf_linear` takes an optional coupling: `mf_linear` or `mf_linear:0.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some(("mf_linear", g)) => {
                let coupling: f64 = g.parse().map_err(|_| format!("bad coupling '{g}'"))?;
                if coupling > 0.0 {
                    Ok(EosChoice::MfLinear { coupling })
                } else {
                    Err("coupling must be positive".into())
                }
            }
            None if s == "mf_linear" => Ok(EosChoice::MfLinear { coupling: 1.0 }),
            None if s == "mf_schick" => Ok(EosChoice::MfSchick),
            None if s == "universal" => Ok(EosChoice::Universal),
            _ => Err(format!("unknown equation of state '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    pub n_particles: f64,
    pub omega: f64,
    pub eos: EosChoice,
    /// 2D s-wave scattering length.
    pub scattering_length: f64,
}

impl TrapConfig {
    /// Configuration with ω = 1 whose LDA parameter √N r₀²/a_ho² equals
    /// `lda_param`, with r₀ = a/3.17222.
    pub fn from_lda_parameter(n_particles: f64, lda_param: f64, eos: EosChoice) -> Self {
        let r0 = (lda_param / n_particles.sqrt()).sqrt();
        Self { n_particles, omega: 1.0, eos, scattering_length: DIPOLAR_SCATTERING_RATIO * r0 }
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        Self { omega, ..*self }
    }

    fn validate(&self) -> Result<(), TrapError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.n_particles) || !ok(self.omega) || !ok(self.scattering_length) {
            return Err(TrapError::Config(format!("{self:?}: all parameters must be positive")));
        }
        if let EosChoice::MfLinear { coupling } = self.eos {
            if !ok(coupling) {
                return Err(TrapError::Config("coupling must be positive".into()));
            }
        }
        Ok(())
    }
}

/// √N·r₀²/a_ho².
pub fn lda_parameter(t: &TrapConfig) -> f64 {
    let r0 = t.scattering_length / DIPOLAR_SCATTERING_RATIO;
    t.n_particles.sqrt() * r0 * r0 * t.omega
}

/// a₂D = prefactor·a_ho,z·exp(−√(π/2)·a_ho,z/a₃D) for a gas under tight
/// transverse confinement.
pub fn effective_scattering_length(a_3d: f64, a_ho_z: f64, prefactor: f64) -> Result<f64, TrapError> {
    if !(a_3d > 0.0 && a_ho_z > 0.0 && prefactor > 0.0) {
        return Err(TrapError::Config("lengths and prefactor must be positive".into()));
    }
    Ok(prefactor * a_ho_z * (-(PI / 2.0).sqrt() * a_ho_z / a_3d).exp())
}

/// A rotationally symmetric density n(r) vanishing beyond `edge_radius`.
pub trait RadialDensity {
    fn density_at(&self, r: f64) -> f64;
    fn edge_radius(&self) -> f64;

    /// Panel boundaries for quadrature; dense near the edge by default.
    fn breakpoints(&self) -> Vec<f64> {
        radial_grid(self.edge_radius())
    }
}

/// Radial grid on [0, R]: uniform in the bulk plus points approaching the
/// edge geometrically.
pub fn radial_grid(edge: f64) -> Vec<f64> {
    const BULK: usize = 32;
    let mut grid: Vec<f64> = (0..BULK).map(|k| edge * k as f64 / BULK as f64).collect();
    let last = *grid.last().unwrap();
    grid.extend((1..=24).map(|j| edge * (1.0 - 10f64.powf(-(j as f64) / 2.0))).filter(|&r| r > last));
    grid.push(edge);
    grid
}

fn radial_moment<D: RadialDensity + ?Sized>(d: &D, power: i32) -> f64 {
    let pts = d.breakpoints();
    let (v, _) = integrate_breakpoints(|r| d.density_at(r) * r.powi(power), &pts, 0.0, QUAD_REL_TOL);
    2.0 * PI * v
}

/// 2π∫ n(r) r dr.
pub fn particle_number<D: RadialDensity + ?Sized>(d: &D) -> f64 {
    radial_moment(d, 1)
}

/// ⟨r²⟩ = ∫ n r³ dr / ∫ n r dr.
pub fn mean_square_radius<D: RadialDensity + ?Sized>(d: &D) -> f64 {
    radial_moment(d, 3) / radial_moment(d, 1)
}

/// LDA density profile of a trapped gas.
#[derive(Debug, Clone)]
pub struct LdaProfile {
    pub config: TrapConfig,
    pub mu0: f64,
    pub edge_radius: f64,
    pub radii: Vec<f64>,
    pub density: Vec<f64>,
}

impl LdaProfile {
    fn at(config: TrapConfig, mu0: f64) -> Self {
        let edge_radius = (2.0 * mu0).sqrt() / config.omega;
        let mut p = Self { config, mu0, edge_radius, radii: Vec::new(), density: Vec::new() };
        p.radii = radial_grid(edge_radius);
        p.density = p.radii.iter().map(|&r| p.density_at(r)).collect();
        p
    }
}

impl RadialDensity for LdaProfile {
    fn density_at(&self, r: f64) -> f64 {
        let mu = self.mu0 - 0.5 * self.config.omega * self.config.omega * r * r;
        // profiles are only built once mu0 is known to be inside the EOS domain
        self.config.eos.density(mu, self.config.scattering_length).unwrap_or(f64::NAN)
    }

    fn edge_radius(&self) -> f64 {
        self.edge_radius
    }
}

/// Solves μ(n(r)) = μ₀ − ω²r²/2, with μ₀ fixed by the particle number.
pub fn lda_profile(t: &TrapConfig) -> Result<LdaProfile, TrapError> {
    t.validate()?;
    let a = t.scattering_length;
    let number = |mu0: f64| -> Result<f64, TrapError> {
        t.eos.density(mu0, a)?;
        Ok(particle_number(&LdaProfile::at(*t, mu0)))
    };
    // bracket ln μ₀, starting from the Thomas–Fermi estimate of a linear EOS
    let g_guess = match t.eos {
        EosChoice::MfLinear { coupling } => coupling,
        _ => {
            let n_guess = (t.n_particles / PI).sqrt() * t.omega;
            let l = -(n_guess * a * a).ln();
            4.0 * PI / l.max(1.0)
        }
    };
    let guess = t.omega * (t.n_particles * g_guess / PI).sqrt();
    let mut lo = guess.ln() - 1.0;
    let mut hi = guess.ln() + 1.0;
    let mut steps = 0;
    while number(lo.exp())? > t.n_particles {
        lo -= 2.0;
        steps += 1;
        if steps > 200 {
            return Err(TrapError::Numeric("no lower bracket for mu0".into()));
        }
    }
    while number(hi.exp())? < t.n_particles {
        hi += 1.0;
        steps += 1;
        if steps > 200 {
            return Err(TrapError::Numeric("no upper bracket for mu0".into()));
        }
    }
    let mut failure = None;
    let ln_mu0 = bisect(
        |x| match number(x.exp()) {
            Ok(n) => n - t.n_particles,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        4.0 * f64::EPSILON * hi.abs().max(1.0),
        400,
    )
    .map_err(|e| TrapError::Numeric(e.to_string()))?;
    if let Some(e) = failure {
        return Err(e);
    }
    let profile = LdaProfile::at(*t, ln_mu0.exp());
    let n = particle_number(&profile);
    if ((n - t.n_particles) / t.n_particles).abs() > NORMALIZATION_TOL {
        return Err(TrapError::Numeric(format!("normalization {n} vs {}", t.n_particles)));
    }
    Ok(profile)
}

/// Ω²/ω² from the compressional sum rule Ω² = −2⟨r²⟩/(d⟨r²⟩/dω²) at fixed N,
/// given ⟨r²⟩ as a function of ω².
///
/// The derivative is a central difference with relative step `rel_step`,
/// cross-checked against step `2·rel_step`.
pub fn sum_rule_ratio<F>(mut r2_of_omega2: F, omega2: f64, rel_step: f64) -> Result<f64, TrapError>
where
    F: FnMut(f64) -> Result<f64, TrapError>,
{
    let mut slope = |h: f64| -> Result<f64, TrapError> {
        let up = r2_of_omega2(omega2 * (1.0 + h))?;
        let down = r2_of_omega2(omega2 * (1.0 - h))?;
        Ok((up - down) / (2.0 * h * omega2))
    };
    let d1 = slope(rel_step)?;
    let d2 = slope(2.0 * rel_step)?;
    let gap = ((d1 - d2) / d1).abs();
    if !(gap <= DERIVATIVE_CONSISTENCY) {
        return Err(TrapError::Derivative { gap });
    }
    let r2 = r2_of_omega2(omega2)?;
    Ok(-2.0 * r2 / (d1 * omega2))
}

/// Ω²/ω² of the lowest breathing mode, relative step 1e−4 in ω².
pub fn breathing_frequency(t: &TrapConfig) -> Result<f64, TrapError> {
    breathing_frequency_with_step(t, DEFAULT_DERIVATIVE_STEP)
}

pub fn breathing_frequency_with_step(t: &TrapConfig, rel_step: f64) -> Result<f64, TrapError> {
    let r2 = |omega2: f64| -> Result<f64, TrapError> {
        let profile = lda_profile(&t.with_omega(omega2.sqrt()))?;
        Ok(mean_square_radius(&profile))
    };
    sum_rule_ratio(r2, t.omega * t.omega, rel_step)
}

/// Gas parameter at the trap centre.
pub fn central_gas_parameter(p: &LdaProfile) -> Result<GasParameter, crate::eos::EosError> {
    GasParameter::from_na2(p.density_at(0.0) * p.config.scattering_length.powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct UniformDisk(f64);

    impl RadialDensity for UniformDisk {
        fn density_at(&self, r: f64) -> f64 {
            if r <= self.0 {
                1.0
            } else {
                0.0
            }
        }
        fn edge_radius(&self) -> f64 {
            self.0
        }
    }

    fn linear(n: f64, omega: f64, g: f64) -> TrapConfig {
        TrapConfig { n_particles: n, omega, eos: EosChoice::MfLinear { coupling: g }, scattering_length: 1e-3 }
    }

    #[test]
    fn linear_profile_matches_thomas_fermi() {
        let (n, omega, g) = (1e4, 1.3, 0.2);
        let p = lda_profile(&linear(n, omega, g)).unwrap();
        let mu0 = omega * (n * g / PI).sqrt();
        assert!(((p.mu0 - mu0) / mu0).abs() < 1e-8);
        for &r in &[0.0, 0.3 * p.edge_radius, 0.9 * p.edge_radius] {
            let exact = (mu0 - 0.5 * omega * omega * r * r) / g;
            assert!(((p.density_at(r) - exact) / exact).abs() < 1e-8);
        }
        let r2_tf = 2.0 * mu0 / (omega * omega);
        assert!(((mean_square_radius(&p) - r2_tf / 3.0) / (r2_tf / 3.0)).abs() < 1e-6);
    }

    #[test]
    fn disk_geometry() {
        let r2 = mean_square_radius(&UniformDisk(2.0));
        assert!((r2 - 2.0).abs() < 1e-12);
        assert!((mean_square_radius(&UniformDisk(4.0)) / r2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn log_eos_round_trip() {
        let a = 1e-3;
        for eos in [EosChoice::MfSchick, EosChoice::Universal] {
            for &n in &[1e-3, 1.0, 1e3] {
                let mu = eos.chemical_potential(n, a).unwrap();
                let back = eos.density(mu, a).unwrap();
                assert!(((back - n) / n).abs() < 1e-12, "{eos} n={n}");
            }
        }
        // universal is undefined above na² = e^{−e}
        assert!(matches!(EosChoice::Universal.density(10.0, 1.0), Err(TrapError::Model { .. })));
    }

    #[test]
    fn profiles_normalized_and_decreasing() {
        for eos in [EosChoice::MfLinear { coupling: 0.3 }, EosChoice::MfSchick, EosChoice::Universal] {
            let t = TrapConfig::from_lda_parameter(1e4, 1e-4, eos);
            let p = lda_profile(&t).unwrap();
            assert!(((particle_number(&p) - 1e4) / 1e4).abs() < 1e-8);
            assert!(p.density.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*p.density.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn mu0_increases_with_particle_number() {
        for eos in [EosChoice::MfLinear { coupling: 0.3 }, EosChoice::MfSchick, EosChoice::Universal] {
            let base = TrapConfig::from_lda_parameter(1e4, 1e-4, eos);
            let mu: Vec<f64> = [0.5, 1.0, 2.0]
                .iter()
                .map(|f| lda_profile(&TrapConfig { n_particles: base.n_particles * f, ..base }).unwrap().mu0)
                .collect();
            assert!(mu[0] < mu[1] && mu[1] < mu[2]);
        }
    }

    #[test]
    fn scale_invariant_limits() {
        let ratio = breathing_frequency(&linear(1e3, 0.7, 0.1)).unwrap();
        assert!((ratio - 4.0).abs() < 1e-3);
        let ideal = sum_rule_ratio(|w2| Ok(1.0 / w2.sqrt()), 2.0, DEFAULT_DERIVATIVE_STEP).unwrap();
        assert!((ideal - 4.0).abs() < 1e-6);
    }

    #[test]
    fn quasi_2d_scattering_length() {
        let f = effective_scattering_length(1.0, 10.0, 1.0).unwrap() / 10.0;
        assert!((f - (-12.533_141_373_155_f64).exp()).abs() < 1e-15);
        assert!((f - 3.6e-6).abs() < 1e-7);
        let tiny = effective_scattering_length(1.0, 1e-9, 1.0).unwrap() / 1e-9;
        assert!((tiny - 1.0).abs() < 1e-8);
        let two = effective_scattering_length(0.3, 2.0, 2.0).unwrap();
        assert_eq!(two, 2.0 * effective_scattering_length(0.3, 2.0, 1.0).unwrap());
        assert!(effective_scattering_length(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lda_parameter_scaling() {
        let a_ho2 = 1.0;
        let r0 = (1e-4_f64 * a_ho2).sqrt();
        let t = TrapConfig { n_particles: 1e4, omega: 1.0, eos: EosChoice::MfSchick, scattering_length: DIPOLAR_SCATTERING_RATIO * r0 };
        assert!((lda_parameter(&t) - 0.01).abs() < 1e-15);
        let t4 = TrapConfig { n_particles: 4e4, ..t };
        assert!((lda_parameter(&t4) / lda_parameter(&t) - 2.0).abs() < 1e-14);
        let built = TrapConfig::from_lda_parameter(1e4, 0.01, EosChoice::MfSchick);
        assert!((lda_parameter(&built) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn eos_names_parse() {
        assert_eq!("universal".parse::<EosChoice>().unwrap(), EosChoice::Universal);
        assert_eq!("mf_linear:0.5".parse::<EosChoice>().unwrap(), EosChoice::MfLinear { coupling: 0.5 });
        assert!("mf_linear:-1".parse::<EosChoice>().is_err());
        assert!("lhy".parse::<EosChoice>().is_err());
    }
}
