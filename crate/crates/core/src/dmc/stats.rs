//! Blocking analysis and bias extrapolations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DmcError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateTag {
    Vmc,
    DmcMixed,
    Extrapolated,
}

impl EstimateTag {
    pub fn name(self) -> &'static str {
        match self {
            EstimateTag::Vmc => "vmc",
            EstimateTag::DmcMixed => "dmc_mixed",
            EstimateTag::Extrapolated => "extrapolated",
        }
    }
}

impl fmt::Display for EstimateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimateTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vmc" => Ok(EstimateTag::Vmc),
            "dmc_mixed" => Ok(EstimateTag::DmcMixed),
            "extrapolated" => Ok(EstimateTag::Extrapolated),
            _ => Err(format!("unknown estimate tag '{s}'")),
        }
    }
}

/// Energy per particle with its one-σ error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub mean: f64,
    pub err: f64,
    pub tag: EstimateTag,
}

impl fmt::Display for EnergyEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {} ({})", self.mean, self.err, self.tag)
    }
}

/// Result of a Flyvbjerg–Petersen blocking pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocking {
    pub mean: f64,
    /// Standard error at each blocking level (block size 2^k).
    pub errors: Vec<f64>,
    /// Level selected as the plateau.
    pub plateau: usize,
}

impl Blocking {
    pub fn err(&self) -> f64 {
        self.errors[self.plateau]
    }
}

/// Blocking analysis of a correlated series.
///
/// The plateau is the first level whose block size B satisfies
/// B³ > 2n·(σ_B/σ₀)⁴, the point where blocks are long compared with the
/// correlation time estimated from the error growth itself. If no level
/// qualifies the largest reliable one (at least 8 blocks) is used.
pub fn blocking(series: &[f64]) -> Blocking {
    let n = series.len();
    assert!(n > 0, "blocking needs data");
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut data = series.to_vec();
    let mut errors = Vec::new();
    while data.len() >= 2 {
        let m = data.len() as f64;
        let mu = data.iter().sum::<f64>() / m;
        let var = data.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (m - 1.0);
        errors.push((var / m).sqrt());
        if data.len() < 16 {
            break;
        }
        data = data.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    }
    if errors.is_empty() {
        return Blocking { mean, errors: vec![0.0], plateau: 0 };
    }
    let s0 = errors[0];
    let last = errors.len() - 1;
    let plateau = if s0 == 0.0 {
        0
    } else {
        (0..=last)
            .find(|&k| {
                let b = (1usize << k) as f64;
                b * b * b > 2.0 * n as f64 * (errors[k] / s0).powi(4)
            })
            .unwrap_or(last)
    };
    Blocking { mean, errors, plateau }
}

/// Weighted least-squares line y = a + b·x through (x, y ± σ); returns
/// (a, σ_a). Zero errors are treated as equal weights.
fn weighted_intercept(points: &[(f64, f64, f64)]) -> Result<(f64, f64), DmcError> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 {
        return Err(DmcError::InsufficientData { found: xs.len() });
    }
    let all_exact = points.iter().all(|p| p.2 == 0.0);
    let weight = |s: f64| if all_exact { 1.0 } else { 1.0 / (s * s) };
    if !all_exact && points.iter().any(|p| !(p.2 > 0.0)) {
        return Err(DmcError::Numeric("extrapolation needs positive errors".into()));
    }
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, e) in points {
        let w = weight(e);
        s += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    let a = (sxx * sy - sx * sxy) / det;
    let var_a = if all_exact { 0.0 } else { sxx / det };
    Ok((a, var_a.sqrt()))
}

/// Linear extrapolation of the energy to zero timestep.
pub fn extrapolate_timestep(results: &[(f64, EnergyEstimate)]) -> Result<EnergyEstimate, DmcError> {
    let pts: Vec<_> = results.iter().map(|(t, e)| (*t, e.mean, e.err)).collect();
    let (mean, err) = weighted_intercept(&pts)?;
    Ok(EnergyEstimate { mean, err, tag: EstimateTag::Extrapolated })
}

/// Linear extrapolation in 1/N to the thermodynamic limit.
pub fn extrapolate_size(results: &[(usize, EnergyEstimate)]) -> Result<EnergyEstimate, DmcError> {
    let pts: Vec<_> = results.iter().map(|(n, e)| (1.0 / *n as f64, e.mean, e.err)).collect();
    let (mean, err) = weighted_intercept(&pts)?;
    Ok(EnergyEstimate { mean, err, tag: EstimateTag::Extrapolated })
}
