//! Pair-product (Jastrow) guiding function Ψ = Π f₂(r_ij).
//!
//! Everything is handled through u = ln f₂ and its radial derivatives.
//! Inside `match_radius` f₂ is the zero-energy two-body solution; outside it
//! is B − c·h − d·h² with h(r) = 1/r + 1/(L−r) − 4/L, which is symmetric
//! about L/2 (so u′(L/2) = 0) and has enough freedom to join the inner
//! branch with continuous u, u′ and u″.

use crate::specfun::bessel_k01_scaled;

use super::potential::{PotentialKind, PotentialModel};
use super::DmcError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidingParams {
    pub match_radius: f64,
}

impl GuidingParams {
    /// match_radius = box/4.
    pub fn default_for_box(box_len: f64) -> Self {
        Self { match_radius: 0.25 * box_len }
    }
}

/// u, u′, u″ and the (truncated) potential at one pair distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerms {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub v: f64,
}

impl PairTerms {
    /// Pair contribution V − ∇²u to the local energy (the gradient-squared
    /// part is not pairwise and is handled by the caller).
    #[inline]
    pub fn energy(&self, r: f64) -> f64 {
        self.v - self.d2u - self.du / r
    }
}

/// Anything that supplies pair terms as a function of distance.
pub trait PairJastrow: Sync {
    fn terms(&self, r: f64) -> PairTerms;
    /// Hard-core radius (0 for soft potentials).
    fn core(&self) -> f64;
    /// u only; used for Metropolis ratios.
    #[inline]
    fn log_f(&self, r: f64) -> f64 {
        self.terms(r).u
    }
}

/// Closed-form pair function, evaluated exactly at every call.
#[derive(Debug, Clone)]
pub struct PairGuiding {
    potential: PotentialModel,
    match_radius: f64,
    box_len: f64,
    half_box: f64,
    tail_b: f64,
    tail_c: f64,
    tail_d: f64,
}

impl PairGuiding {
    pub fn new(potential: PotentialModel, params: GuidingParams, box_len: f64) -> Result<Self, DmcError> {
        potential.validate()?;
        let half_box = 0.5 * box_len;
        let rm = params.match_radius;
        if !(rm > potential.core() && rm < half_box) {
            return Err(DmcError::Config(format!(
                "match_radius {rm} must lie in ({}, {half_box})",
                potential.core()
            )));
        }
        let mut g = Self {
            potential,
            match_radius: rm,
            box_len,
            half_box,
            tail_b: 0.0,
            tail_c: 0.0,
            tail_d: 0.0,
        };
        if potential.kind != PotentialKind::Free {
            let inner = g.inner(rm);
            let [h, h1, h2, _] = g.h_derivs(rm);
            // u′ = −(c + 2dh)h′,  u″ = −(c + 2dh)h″ − 2d h′²
            let s = -inner[1] / h1;
            let d = -(inner[2] + s * h2) / (2.0 * h1 * h1);
            let c = s - 2.0 * d * h;
            g.tail_c = c;
            g.tail_d = d;
            g.tail_b = inner[0] + c * h + d * h * h;
        }
        Ok(g)
    }

    pub fn potential(&self) -> &PotentialModel {
        &self.potential
    }

    pub fn match_radius(&self) -> f64 {
        self.match_radius
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    /// Tail coefficients (B, c, d) of u = B − c·h − d·h².
    pub fn tail_coefficients(&self) -> (f64, f64, f64) {
        (self.tail_b, self.tail_c, self.tail_d)
    }

    fn h_derivs(&self, r: f64) -> [f64; 4] {
        let s = self.box_len - r;
        [
            1.0 / r + 1.0 / s - 4.0 / self.box_len,
            -1.0 / (r * r) + 1.0 / (s * s),
            2.0 / (r * r * r) + 2.0 / (s * s * s),
            -6.0 / (r * r * r * r) + 6.0 / (s * s * s * s),
        ]
    }

    /// [u, u′, u″, u‴] of the zero-energy solution.
    fn inner(&self, r: f64) -> [f64; 4] {
        let p = &self.potential;
        let (u, du, v, dv) = match p.kind {
            PotentialKind::Free => return [0.0; 4],
            PotentialKind::HardDisk => {
                let l = (r / p.range).ln();
                (l.ln(), 1.0 / (r * l), 0.0, 0.0)
            }
            PotentialKind::Dipolar => {
                let x = 2.0 * (p.range / r).sqrt();
                let (k0, k1) = bessel_k01_scaled(x).expect("x > 0");
                // ln K₀ with the scaling e^{-x} undone
                let u = k0.ln() - x;
                let v = p.range / (r * r * r);
                (u, x * k1 / (2.0 * r * k0), v, -3.0 * v / r)
            }
        };
        // from f″ + f′/r = V f
        let d2u = v - du * du - du / r;
        let d3u = dv - 2.0 * du * d2u - d2u / r + du / (r * r);
        [u, du, d2u, d3u]
    }

    fn outer(&self, r: f64) -> [f64; 4] {
        let [h, h1, h2, h3] = self.h_derivs(r);
        let (b, c, d) = (self.tail_b, self.tail_c, self.tail_d);
        let s = c + 2.0 * d * h;
        [b - c * h - d * h * h, -s * h1, -s * h2 - 2.0 * d * h1 * h1, -s * h3 - 6.0 * d * h1 * h2]
    }

    /// [u, u′, u″, u‴] for core < r; constant beyond L/2.
    pub fn log_derivatives(&self, r: f64) -> [f64; 4] {
        if self.potential.kind == PotentialKind::Free {
            [0.0; 4]
        } else if r >= self.half_box {
            [self.outer(self.half_box)[0], 0.0, 0.0, 0.0]
        } else if r <= self.match_radius {
            self.inner(r)
        } else {
            self.outer(r)
        }
    }

    /// f₂(r). Zero inside the hard core.
    pub fn value(&self, r: f64) -> f64 {
        if r <= self.potential.core() {
            0.0
        } else {
            self.log_derivatives(r)[0].exp()
        }
    }

    pub(crate) fn truncated_potential(&self, r: f64) -> f64 {
        if r >= self.half_box || self.potential.kind != PotentialKind::Dipolar {
            0.0
        } else {
            self.potential.pair_potential(r)
        }
    }
}

impl PairJastrow for PairGuiding {
    fn terms(&self, r: f64) -> PairTerms {
        if r <= self.potential.core() {
            return PairTerms { u: f64::NEG_INFINITY, du: f64::INFINITY, d2u: f64::NEG_INFINITY, v: f64::INFINITY };
        }
        let [u, du, d2u, _] = self.log_derivatives(r);
        PairTerms { u, du, d2u, v: self.truncated_potential(r) }
    }

    fn core(&self) -> f64 {
        self.potential.core()
    }
}

/// f₂(r) for the given potential, guiding parameters and box side.
pub fn pair_guiding(p: &PotentialModel, g: &GuidingParams, box_len: f64, r: f64) -> Result<f64, DmcError> {
    if !(r > 0.0 && r <= 0.5 * box_len) {
        return Err(DmcError::Numeric(format!("pair distance {r} outside (0, {}]", 0.5 * box_len)));
    }
    let pg = PairGuiding::new(*p, *g, box_len)?;
    if r <= p.core() {
        log::debug!("pair distance {r} inside hard core {}", p.core());
    }
    Ok(pg.value(r))
}

/// Cubic-Hermite tables of u, u′, u″ on a uniform radial grid.
///
/// Below `r_lo` (deep under the dipolar barrier, or close to a hard core)
/// the exact functions are used.
#[derive(Debug, Clone)]
pub struct PairTable {
    exact: PairGuiding,
    r_lo: f64,
    h: f64,
    inv_h: f64,
    half_box: f64,
    u_far: f64,
    // per node: u, u′, u″, u‴ (left), u‴ (right), V, V′
    nodes: Vec<[f64; 7]>,
}

impl PairTable {
    /// Node spacing in units of the potential range.
    pub const SPACING: f64 = 2e-3;

    pub fn new(exact: PairGuiding) -> Self {
        let p = *exact.potential();
        let half_box = 0.5 * exact.box_len();
        let rm = exact.match_radius();
        let h = Self::SPACING * p.range;
        let start = match p.kind {
            PotentialKind::Dipolar => 0.2 * p.range,
            PotentialKind::HardDisk => 1.1 * p.range,
            PotentialKind::Free => 0.0,
        };
        // put a node exactly on the match radius, where u‴ jumps
        let below = ((rm - start) / h).floor().max(0.0);
        let r_lo = rm - below * h;
        let count = ((half_box - r_lo) / h).ceil() as usize + 2;
        let nodes = (0..count)
            .map(|i| {
                let r = r_lo + i as f64 * h;
                // nodes past L/2 carry the analytic continuation so the last
                // interval interpolates a smooth function
                let [u, du, d2u, d3u] = if i as f64 == below || r < rm {
                    exact.inner(r)
                } else {
                    exact.outer(r)
                };
                // u‴ is one-sided at the joint
                let d3u_right = if i as f64 == below { exact.outer(r)[3] } else { d3u };
                let v = p.pair_potential(r) * f64::from(p.kind == PotentialKind::Dipolar);
                [u, du, d2u, d3u, d3u_right, v, -3.0 * v / r]
            })
            .collect();
        let u_far = exact.log_derivatives(half_box)[0];
        Self { exact, r_lo, h, inv_h: 1.0 / h, half_box, u_far, nodes }
    }

    pub fn exact(&self) -> &PairGuiding {
        &self.exact
    }

    #[inline]
    fn locate(&self, r: f64) -> (usize, f64) {
        let s = (r - self.r_lo) * self.inv_h;
        let i = s as usize;
        (i, s - i as f64)
    }
}

#[inline]
fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, t: f64, h: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

impl PairJastrow for PairTable {
    #[inline]
    fn terms(&self, r: f64) -> PairTerms {
        if r >= self.half_box {
            return PairTerms { u: self.u_far, du: 0.0, d2u: 0.0, v: 0.0 };
        }
        if r < self.r_lo {
            return self.exact.terms(r);
        }
        let (i, t) = self.locate(r);
        let a = &self.nodes[i];
        let b = &self.nodes[i + 1];
        let h = self.h;
        PairTerms {
            u: hermite(a[0], a[1], b[0], b[1], t, h),
            du: hermite(a[1], a[2], b[1], b[2], t, h),
            d2u: hermite(a[2], a[4], b[2], b[3], t, h),
            v: hermite(a[5], a[6], b[5], b[6], t, h),
        }
    }

    #[inline]
    fn log_f(&self, r: f64) -> f64 {
        if r >= self.half_box {
            return self.u_far;
        }
        if r < self.r_lo {
            return self.exact.terms(r).u;
        }
        let (i, t) = self.locate(r);
        let a = &self.nodes[i];
        let b = &self.nodes[i + 1];
        hermite(a[0], a[1], b[0], b[1], t, self.h)
    }

    fn core(&self) -> f64 {
        self.exact.core()
    }
}
