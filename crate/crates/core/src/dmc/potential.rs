use std::fmt;
use std::str::FromStr;

use crate::eos::DIPOLAR_SCATTERING_RATIO;

use super::DmcError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialKind {
    /// V(r) = range/r³ (units ħ²/m = 1).
    Dipolar,
    /// Impenetrable disks of diameter `range`.
    HardDisk,
    /// No interaction, constant guiding function. Reference model for tests.
    Free,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Dipolar => "dipolar",
            PotentialKind::HardDisk => "hard_disk",
            PotentialKind::Free => "free",
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dipolar" => Ok(PotentialKind::Dipolar),
            "hard_disk" => Ok(PotentialKind::HardDisk),
            "free" => Ok(PotentialKind::Free),
            _ => Err(format!("unknown potential '{s}' (expected dipolar, hard_disk or free)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialModel {
    pub kind: PotentialKind,
    pub range: f64,
}

impl PotentialModel {
    pub fn dipolar(r0: f64) -> Self {
        Self { kind: PotentialKind::Dipolar, range: r0 }
    }

    pub fn hard_disk(diameter: f64) -> Self {
        Self { kind: PotentialKind::HardDisk, range: diameter }
    }

    pub fn free() -> Self {
        Self { kind: PotentialKind::Free, range: 1.0 }
    }

    /// Radius inside which the wave function vanishes.
    pub fn core(&self) -> f64 {
        match self.kind {
            PotentialKind::HardDisk => self.range,
            _ => 0.0,
        }
    }

    /// Analytic s-wave scattering length.
    pub fn scattering_length(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::Dipolar => Some(DIPOLAR_SCATTERING_RATIO * self.range),
            PotentialKind::HardDisk => Some(self.range),
            PotentialKind::Free => None,
        }
    }

    /// Pair potential (untruncated); infinite inside a hard core.
    pub fn pair_potential(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Dipolar => self.range / (r * r * r),
            PotentialKind::HardDisk if r <= self.range => f64::INFINITY,
            _ => 0.0,
        }
    }

    /// Potential energy per particle of the pairs beyond `cutoff`, for a
    /// uniform background at density `density`.
    pub fn tail_correction(&self, density: f64, cutoff: f64) -> f64 {
        match self.kind {
            // (n/2)·∫_{R}^{∞} (r₀/r³)·2πr dr
            PotentialKind::Dipolar => std::f64::consts::PI * density * self.range / cutoff,
            _ => 0.0,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), DmcError> {
        if !(self.range > 0.0) || !self.range.is_finite() {
            return Err(DmcError::Config(format!("potential range must be positive, got {}", self.range)));
        }
        Ok(())
    }
}

/// Scattering length from outward integration of the zero-energy two-body
/// equation f'' + f'/r = V(r)·f.
///
/// In t = ln r the equation is f_tt = r²V f; far out f ∝ t − ln a.
pub fn scattering_length_check(p: &PotentialModel) -> Result<f64, DmcError> {
    p.validate()?;
    const STEP: f64 = 1e-3;
    let (t0, mut f, mut g, t_end) = match p.kind {
        PotentialKind::Free => return Err(DmcError::Numeric("free particles have no scattering length".into())),
        PotentialKind::HardDisk => {
            let t0 = p.range.ln();
            (t0, 0.0, 1.0, t0 + 10.0)
        }
        PotentialKind::Dipolar => {
            // start deep under the barrier, x = 2√(r₀/r) = 40, with the
            // asymptotic log-derivative of K₀(x): (x/2)·(1 + 1/(2x))
            let x: f64 = 40.0;
            let r_start = p.range * 4.0 / (x * x);
            (r_start.ln(), 1.0, 0.5 * x * (1.0 + 0.5 / x), (1e16 * p.range).ln())
        }
    };
    let rhs = |t: f64, f: f64| -> f64 {
        let r = t.exp();
        r * r * match p.kind {
            PotentialKind::Dipolar => p.pair_potential(r),
            _ => 0.0,
        } * f
    };
    let steps = ((t_end - t0) / STEP).ceil() as usize;
    let h = (t_end - t0) / steps as f64;
    let mut t = t0;
    for _ in 0..steps {
        let k1f = g;
        let k1g = rhs(t, f);
        let k2f = g + 0.5 * h * k1g;
        let k2g = rhs(t + 0.5 * h, f + 0.5 * h * k1f);
        let k3f = g + 0.5 * h * k2g;
        let k3g = rhs(t + 0.5 * h, f + 0.5 * h * k2f);
        let k4f = g + h * k3g;
        let k4g = rhs(t + h, f + h * k3f);
        f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        t += h;
        // keep the amplitude O(1)
        if f.abs() > 1e100 {
            f *= 1e-100;
            g *= 1e-100;
        }
    }
    let a = (t - f / g).exp();
    if !a.is_finite() || a <= 0.0 {
        return Err(DmcError::Numeric(format!("scattering length integration diverged (f = {f}, f' = {g})")));
    }
    Ok(a)
}
