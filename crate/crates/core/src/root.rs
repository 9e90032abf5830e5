//! Safeguarded Newton iteration for monotone scalar equations on a bracket.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("bracket [{lo}, {hi}] does not contain a sign change")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once |f(x)| falls below this.
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds the root of `f` inside `[lo, hi]`.
///
/// `f` returns the value and derivative. A Newton step that leaves the
/// current bracket, or fails to halve |f|, is replaced by bisection.
/// Converges on the residual, or when the bracket shrinks to adjacent floats.
pub fn newton_bisect<F>(mut f: F, mut lo: f64, mut hi: f64, x0: f64, opts: RootOptions) -> Result<Root, RootError>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, iterations: 0 });
    }
    if fhi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, iterations: 0 });
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NoSignChange { lo, hi });
    }
    let lo_positive = flo > 0.0;
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    let mut prev_abs = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let (fx, dfx) = f(x);
        if fx.abs() <= opts.residual_tol {
            return Ok(Root { x, residual: fx, iterations: it });
        }
        if (fx > 0.0) == lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(Root { x, residual: fx, iterations: it });
        }
        let newton = x - fx / dfx;
        let stalled = fx.abs() > 0.5 * prev_abs;
        x = if newton.is_finite() && newton > lo && newton < hi && !stalled {
            newton
        } else {
            0.5 * (lo + hi)
        };
        prev_abs = fx.abs();
    }
    Err(RootError::NoConvergence(opts.max_iter))
}

/// Plain bisection for continuous monotone `f`, to bracket width `x_tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64, max_iter: usize) -> Result<f64, RootError> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo.signum() == fhi.signum() {
        return Err(RootError::NoSignChange { lo, hi });
    }
    let lo_positive = flo > 0.0;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(RootError::NoConvergence(max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = newton_bisect(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1.0, RootOptions::default()).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-13);
        assert!(r.residual.abs() <= 1e-12);
    }

    #[test]
    fn bad_newton_falls_back_to_bisection() {
        // atan sends Newton far outside the bracket from x0 = 3
        let r = newton_bisect(|x| (x.atan(), 1.0 / (1.0 + x * x)), -10.0, 10.0, 3.0, RootOptions::default()).unwrap();
        assert!(r.x.abs() < 1e-12);
    }

    #[test]
    fn rejects_bracket_without_sign_change() {
        let e = newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 0.0, RootOptions::default());
        assert!(matches!(e, Err(RootError::NoSignChange { .. })));
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_err());
    }

    #[test]
    fn bisect_sqrt2() {
        let x = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-13);
    }
}
