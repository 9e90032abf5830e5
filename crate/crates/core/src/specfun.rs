//! Scalar special functions: the exponential integral Γ(0,x) = E₁(x) and the
//! modified Bessel functions K₀, K₁.
//!
//! Both families come in a plain and an exponentially scaled flavour. The
//! scaled forms (`e^{x}·f(x)`) never underflow and are what the equation of
//! state layer uses, since it has to reach arguments of several thousand.

use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("argument {0} outside the domain x > 0")]
    Domain(f64),
    #[error("Γ(0, {0}) underflows; use the scaled form")]
    Underflow(f64),
}

/// Evaluation policy for Γ(0,x).
///
/// Below `series_asymptotic_crossover` the power series (x ≤ 1) or the
/// continued fraction is used; above it the asymptotic series, truncated at
/// its smallest term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyPolicy {
    pub rel_tol: f64,
    pub series_asymptotic_crossover: f64,
}

impl Default for AccuracyPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            series_asymptotic_crossover: 40.0,
        }
    }
}

impl AccuracyPolicy {
    pub fn new(rel_tol: f64, series_asymptotic_crossover: f64) -> Option<Self> {
        (rel_tol > 0.0 && rel_tol <= 1e-6 && series_asymptotic_crossover > 0.0).then_some(Self {
            rel_tol,
            series_asymptotic_crossover,
        })
    }

    /// `e^{x}·Γ(0,x)` under this policy.
    pub fn gamma_upper_zero_scaled(&self, x: f64) -> Result<f64, SpecfunError> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(SpecfunError::Domain(x));
        }
        Ok(if x >= self.series_asymptotic_crossover {
            e1_asymptotic_scaled(x, self.rel_tol)
        } else if x <= 1.0 {
            e1_series(x, self.rel_tol) * x.exp()
        } else {
            e1_continued_fraction_scaled(x, self.rel_tol)
        })
    }

    /// Both scaled branches at `x`: (continued fraction or series, asymptotic).
    /// Near the crossover they should agree to about `rel_tol`.
    pub fn branch_values(&self, x: f64) -> Result<(f64, f64), SpecfunError> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(SpecfunError::Domain(x));
        }
        let low = if x <= 1.0 {
            e1_series(x, self.rel_tol) * x.exp()
        } else {
            e1_continued_fraction_scaled(x, self.rel_tol)
        };
        Ok((low, e1_asymptotic_scaled(x, self.rel_tol)))
    }

    pub fn gamma_upper_zero(&self, x: f64) -> Result<f64, SpecfunError> {
        let scaled = self.gamma_upper_zero_scaled(x)?;
        let value = scaled * (-x).exp();
        if value < f64::MIN_POSITIVE {
            return Err(SpecfunError::Underflow(x));
        }
        Ok(value)
    }
}

/// Γ(0,x) = E₁(x) = ∫ₓ^∞ e^{−t}/t dt with the default policy.
pub fn gamma_upper_zero(x: f64) -> Result<f64, SpecfunError> {
    AccuracyPolicy::default().gamma_upper_zero(x)
}

/// e^{x}·Γ(0,x), finite for all positive x.
pub fn gamma_upper_zero_scaled(x: f64) -> Result<f64, SpecfunError> {
    AccuracyPolicy::default().gamma_upper_zero_scaled(x)
}

/// E₁(x) = −γ − ln x − Σ_{k≥1} (−x)^k / (k·k!), good for small x.
pub(crate) fn e1_series(x: f64, tol: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() < tol * 1e-3 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// e^{x}·E₁(x) from the continued fraction
/// 1/(x+1− 1²/(x+3− 2²/(x+5− …))), modified Lentz.
pub(crate) fn e1_continued_fraction_scaled(x: f64, tol: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let eps = tol * 1e-3;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < eps {
            break;
        }
    }
    h
}

/// e^{x}·E₁(x) ≈ (1/x)·Σ (−1)^k k!/x^k, stopped at the smallest term.
pub(crate) fn e1_asymptotic_scaled(x: f64, tol: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0_f64;
    let mut k = 1.0;
    loop {
        let next = -term * k / x;
        if next.abs() >= term.abs() || term.abs() < tol * 1e-3 {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sum / x
}

const BESSEL_SERIES_MAX: f64 = 2.0;

/// e^{x}·K₀(x) and e^{x}·K₁(x) together.
pub fn bessel_k01_scaled(x: f64) -> Result<(f64, f64), SpecfunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecfunError::Domain(x));
    }
    if x <= BESSEL_SERIES_MAX {
        let (k0, k1) = k01_series(x);
        let s = x.exp();
        Ok((k0 * s, k1 * s))
    } else {
        Ok(k01_steed_scaled(x))
    }
}

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(x: f64) -> Result<f64, SpecfunError> {
    let (k0, _) = bessel_k01_scaled(x)?;
    Ok(k0 * (-x).exp())
}

pub fn bessel_k0_scaled(x: f64) -> Result<f64, SpecfunError> {
    Ok(bessel_k01_scaled(x)?.0)
}

pub fn bessel_k1(x: f64) -> Result<f64, SpecfunError> {
    let (_, k1) = bessel_k01_scaled(x)?;
    Ok(k1 * (-x).exp())
}

// K₀ = −(ln(x/2)+γ)·I₀ + Σ q^k/(k!)²·H_k,
// K₁ = 1/x + ln(x/2)·I₁ − (x/4)·Σ q^k/(k!(k+1)!)·(ψ(k+1)+ψ(k+2)), q = x²/4.
fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let lg = (0.5 * x).ln();
    let mut i0 = 1.0;
    let mut i1_sum = 1.0; // I₁ = (x/2)·Σ q^k/(k!(k+1)!)
    let mut k0_sum = 0.0;
    let mut k1_sum = -2.0 * EULER_GAMMA + 1.0; // ψ(1)+ψ(2) at k = 0
    let mut t0 = 1.0; // q^k/(k!)²
    let mut t1 = 1.0; // q^k/(k!(k+1)!)
    let mut harmonic = 0.0;
    for k in 1..100 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        // ψ(k+1) + ψ(k+2) = −2γ + H_k + H_{k+1}
        let psi_sum = -2.0 * EULER_GAMMA + harmonic + harmonic + 1.0 / (kf + 1.0);
        i0 += t0;
        i1_sum += t1;
        k0_sum += t0 * harmonic;
        k1_sum += t1 * psi_sum;
        if t0 < 1e-17 * i0 && t0 * harmonic < 1e-17 * k0_sum.abs().max(1e-300) {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    let k0 = -(lg + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / x + lg * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

// Steed's continued fraction for order zero (Temme's CF2), scaled by e^{x}.
fn k01_steed_scaled(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-16;
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_values() {
        assert!(rel(gamma_upper_zero(1.0).unwrap(), 0.219_383_934_395_520_27) < 1e-13);
        assert!(rel(gamma_upper_zero(20.0).unwrap(), 9.835_525_290_649_886e-11) < 1e-12);
        assert!(rel(bessel_k0(1.0).unwrap(), 0.421_024_438_240_708_3) < 1e-13);
        assert!(rel(bessel_k0(0.1).unwrap(), 2.427_069_024_702_016_6) < 1e-13);
        assert!(rel(bessel_k1(1.0).unwrap(), 0.601_907_230_197_234_6) < 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(gamma_upper_zero(0.0), Err(SpecfunError::Domain(0.0)));
        assert!(gamma_upper_zero_scaled(-1.0).is_err());
        assert!(bessel_k0(0.0).is_err());
        assert!(gamma_upper_zero(f64::NAN).is_err());
        assert_eq!(gamma_upper_zero(800.0), Err(SpecfunError::Underflow(800.0)));
        assert!(gamma_upper_zero_scaled(800.0).unwrap().is_finite());
    }

    #[test]
    fn asymptotic_limits() {
        for &x in &[1e3, 1e4] {
            let s = gamma_upper_zero_scaled(x).unwrap();
            assert!(rel(s * x, 1.0) < 1.1 / x);
        }
        let s = gamma_upper_zero_scaled(1000.0).unwrap();
        assert!(rel(s, 1e-3 * (1.0 - 1e-3)) < 2.1e-6);
        for &x in &[50.0, 200.0, 600.0] {
            let k0 = bessel_k0_scaled(x).unwrap();
            let lead = (std::f64::consts::PI / (2.0 * x)).sqrt();
            assert!(rel(k0, lead) < 0.2 / x);
        }
    }

    #[test]
    fn policy_bounds() {
        assert!(AccuracyPolicy::new(1e-5, 30.0).is_none());
        assert!(AccuracyPolicy::new(1e-10, 0.0).is_none());
        assert!(AccuracyPolicy::new(1e-10, 30.0).is_some());
    }

    #[test]
    fn bessel_branch_joint() {
        let below = k01_series(BESSEL_SERIES_MAX);
        let above = k01_steed_scaled(BESSEL_SERIES_MAX);
        let s = BESSEL_SERIES_MAX.exp();
        assert!(rel(below.0 * s, above.0) < 1e-14);
        assert!(rel(below.1 * s, above.1) < 1e-14);
    }
}
