//! Quadrature oracles built independently of the library.

#![allow(dead_code)]

/// Gauss–Legendre nodes and weights on [-1, 1], from Newton on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite rule: `panels` equal panels on [a, b], `rule` on each.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        total += rule.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h;
    }
    total
}

/// e^{x}·E₁(x) = ∫₀^∞ e^{−s}/(x+s) ds, cut at s = 80.
pub fn e1_scaled_oracle(x: f64) -> f64 {
    let rule = gauss_legendre(30);
    composite(|s| (-s).exp() / (x + s), 0.0, 80.0, 80, &rule)
}

/// e^{x}·K₀(x) = ∫₀^∞ exp(−x(cosh t − 1)) dt, cut where the exponent passes 60.
pub fn k0_scaled_oracle(x: f64) -> f64 {
    let t_max = (1.0 + 60.0 / x).acosh();
    let rule = gauss_legendre(30);
    let panels = (t_max / 0.1).ceil() as usize;
    composite(|t| (-x * (t.cosh() - 1.0)).exp(), 0.0, t_max, panels, &rule)
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Fixed point u ← 1/(rhs − ln u) for the in-medium amplitude.
pub fn cherny_fixed_point(l: f64) -> f64 {
    let rhs = l - std::f64::consts::PI.ln() - 2.0 * 0.577_215_664_901_532_9;
    let mut u = 1.0 / rhs;
    for _ in 0..10_000 {
        let next = 1.0 / (rhs - u.ln());
        if (next - u).abs() < 1e-17 {
            return next;
        }
        u = next;
    }
    u
}
