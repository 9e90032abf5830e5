//! Periodic N-body configuration, guiding-function bookkeeping and the local
//! energy.

use rand::Rng;

use super::guiding::{GuidingParams, PairGuiding, PairJastrow, PairTable};
use super::potential::PotentialModel;
use super::rng::{stream, Domain};
use super::DmcError;

pub type Vec2 = [f64; 2];

/// One configuration of N particles plus cached ln Ψ, ∇ᵢ ln Ψ and E_L.
#[derive(Debug, Clone, PartialEq)]
pub struct Walker {
    pub positions: Vec<Vec2>,
    pub lineage: u64,
    pub log_psi: f64,
    pub drift: Vec<Vec2>,
    /// Total local energy (not per particle).
    pub e_local: f64,
}

/// Box geometry, pair function and the constant tail energy.
#[derive(Debug, Clone)]
pub struct System<P> {
    pub pair: P,
    pub n: usize,
    pub box_len: f64,
    pub density: f64,
    tail_total: f64,
}

/// Ψ-ratio and gradient bookkeeping for a single-particle move.
#[derive(Debug, Clone, Default)]
pub(crate) struct MoveScratch {
    old: Vec<Vec2>,
    new: Vec<Vec2>,
}

impl MoveScratch {
    pub(crate) fn new(n: usize) -> Self {
        Self { old: vec![[0.0; 2]; n], new: vec![[0.0; 2]; n] }
    }
}

pub(crate) struct ProposedMove {
    pub delta_u: f64,
    pub drift_new: Vec2,
}

impl System<PairTable> {
    /// Tabulated system, the form used for sampling.
    pub fn tabulated(potential: PotentialModel, guiding: GuidingParams, n: usize, density: f64) -> Result<Self, DmcError> {
        let exact = System::exact(potential, guiding, n, density)?;
        Ok(System {
            pair: PairTable::new(exact.pair),
            n,
            box_len: exact.box_len,
            density,
            tail_total: exact.tail_total,
        })
    }
}

impl System<PairGuiding> {
    pub fn exact(potential: PotentialModel, guiding: GuidingParams, n: usize, density: f64) -> Result<Self, DmcError> {
        if n < 2 {
            return Err(DmcError::Config(format!("need at least 2 particles, got {n}")));
        }
        if !(density > 0.0 && density.is_finite()) {
            return Err(DmcError::Config(format!("density must be positive, got {density}")));
        }
        let box_len = (n as f64 / density).sqrt();
        let pair = PairGuiding::new(potential, guiding, box_len)?;
        let tail_total = n as f64 * potential.tail_correction(density, 0.5 * box_len);
        Ok(System { pair, n, box_len, density, tail_total })
    }
}

impl<P: PairJastrow> System<P> {
    #[inline]
    pub fn min_image(&self, d: f64) -> f64 {
        d - self.box_len * (d / self.box_len).round()
    }

    #[inline]
    pub fn fold(&self, x: f64) -> f64 {
        let y = x - self.box_len * (x / self.box_len).floor();
        if y >= self.box_len {
            0.0
        } else {
            y
        }
    }

    /// Tail energy for the whole box.
    pub fn tail_energy(&self) -> f64 {
        self.tail_total
    }

    #[inline]
    fn separation(&self, a: &Vec2, b: &Vec2) -> (f64, f64, f64) {
        let dx = self.min_image(a[0] - b[0]);
        let dy = self.min_image(a[1] - b[1]);
        (dx, dy, (dx * dx + dy * dy).sqrt())
    }

    /// True if any pair sits inside the hard core.
    pub fn overlaps(&self, positions: &[Vec2]) -> bool {
        let core = self.pair.core();
        if core <= 0.0 {
            return false;
        }
        for i in 0..positions.len() {
            for j in 0..i {
                if self.separation(&positions[i], &positions[j]).2 <= core {
                    return true;
                }
            }
        }
        false
    }

    /// Fills ln Ψ, the drift ∇ᵢ ln Ψ and E_L from scratch. Overlapping
    /// configurations get E_L = +∞.
    pub fn evaluate(&self, w: &mut Walker) {
        let n = w.positions.len();
        w.drift.clear();
        w.drift.resize(n, [0.0; 2]);
        let mut log_psi = 0.0;
        let mut pair_energy = 0.0;
        let core = self.pair.core();
        let mut overlap = false;
        for i in 0..n {
            for j in 0..i {
                let (dx, dy, r) = self.separation(&w.positions[i], &w.positions[j]);
                if r <= core {
                    overlap = true;
                    continue;
                }
                let t = self.pair.terms(r);
                log_psi += t.u;
                pair_energy += t.energy(r);
                let g = t.du / r;
                w.drift[i][0] += g * dx;
                w.drift[i][1] += g * dy;
                w.drift[j][0] -= g * dx;
                w.drift[j][1] -= g * dy;
            }
        }
        if overlap {
            w.log_psi = f64::NEG_INFINITY;
            w.e_local = f64::INFINITY;
            return;
        }
        let grad2: f64 = w.drift.iter().map(|f| f[0] * f[0] + f[1] * f[1]).sum();
        w.log_psi = log_psi;
        w.e_local = pair_energy - 0.5 * grad2 + self.tail_total;
    }

    pub fn walker(&self, positions: Vec<Vec2>, lineage: u64) -> Walker {
        let mut w = Walker { positions, lineage, log_psi: 0.0, drift: Vec::new(), e_local: 0.0 };
        for p in &mut w.positions {
            p[0] = self.fold(p[0]);
            p[1] = self.fold(p[1]);
        }
        self.evaluate(&mut w);
        w
    }

    /// Jittered square lattice; free of hard-core overlaps whenever the
    /// lattice spacing exceeds the core by a margin.
    pub fn initial_walker(&self, seed: u64, lineage: u64) -> Walker {
        let side = (self.n as f64).sqrt().ceil() as usize;
        let spacing = self.box_len / side as f64;
        let jitter = 0.1 * (spacing - self.pair.core()).max(0.0);
        let mut rng = stream(seed, Domain::Init, lineage, 0);
        // shuffle the used lattice sites when the lattice is not full
        let mut sites: Vec<usize> = (0..side * side).collect();
        for i in (1..sites.len()).rev() {
            let j = rng.random_range(0..=i);
            sites.swap(i, j);
        }
        let positions = sites[..self.n]
            .iter()
            .map(|&s| {
                let (ix, iy) = (s % side, s / side);
                [
                    (ix as f64 + 0.5) * spacing + jitter * (rng.random::<f64>() - 0.5),
                    (iy as f64 + 0.5) * spacing + jitter * (rng.random::<f64>() - 0.5),
                ]
            })
            .collect();
        self.walker(positions, lineage)
    }

    /// Δ ln Ψ for moving particle k to `to` (already folded). None if the
    /// move would create a hard-core overlap.
    pub(crate) fn delta_log_psi(&self, w: &Walker, k: usize, to: &Vec2) -> Option<f64> {
        let core = self.pair.core();
        let from = &w.positions[k];
        let mut du = 0.0;
        for (j, pj) in w.positions.iter().enumerate() {
            if j == k {
                continue;
            }
            let r_new = self.separation(to, pj).2;
            if r_new <= core {
                return None;
            }
            du += self.pair.log_f(r_new) - self.pair.log_f(self.separation(from, pj).2);
        }
        Some(du)
    }

    /// Like `delta_log_psi`, but also stores the pair gradients before and
    /// after so an accepted move can update every drift in O(N).
    pub(crate) fn propose(&self, w: &Walker, k: usize, to: &Vec2, s: &mut MoveScratch) -> Option<ProposedMove> {
        let core = self.pair.core();
        let from = &w.positions[k];
        let mut du = 0.0;
        let mut drift_new = [0.0; 2];
        for (j, pj) in w.positions.iter().enumerate() {
            if j == k {
                s.old[j] = [0.0; 2];
                s.new[j] = [0.0; 2];
                continue;
            }
            let (dx, dy, r) = self.separation(to, pj);
            if r <= core {
                return None;
            }
            let tn = self.pair.terms(r);
            let gn = tn.du / r;
            s.new[j] = [gn * dx, gn * dy];
            drift_new[0] += gn * dx;
            drift_new[1] += gn * dy;
            let (ox, oy, ro) = self.separation(from, pj);
            let to_ = self.pair.terms(ro);
            let go = to_.du / ro;
            s.old[j] = [go * ox, go * oy];
            du += tn.u - to_.u;
        }
        Some(ProposedMove { delta_u: du, drift_new })
    }

    pub(crate) fn accept(&self, w: &mut Walker, k: usize, to: Vec2, mv: &ProposedMove, s: &MoveScratch) {
        for j in 0..w.positions.len() {
            if j != k {
                // ∇_j u(r_jk) = −∇_k u(r_jk)
                w.drift[j][0] += s.old[j][0] - s.new[j][0];
                w.drift[j][1] += s.old[j][1] - s.new[j][1];
            }
        }
        w.drift[k] = mv.drift_new;
        w.positions[k] = to;
        w.log_psi += mv.delta_u;
    }
}

/// Total E_L for a walker with the exact guiding function.
pub fn local_energy(p: &PotentialModel, g: &GuidingParams, density: f64, w: &Walker) -> Result<f64, DmcError> {
    let sys = System::exact(*p, *g, w.positions.len(), density)?;
    let mut w = w.clone();
    sys.evaluate(&mut w);
    Ok(w.e_local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_walker<P: PairJastrow>(sys: &System<P>, seed: u64) -> Walker {
        let mut rng = stream(seed, Domain::Init, 99, 1);
        loop {
            let pos: Vec<Vec2> =
                (0..sys.n).map(|_| [rng.random::<f64>() * sys.box_len, rng.random::<f64>() * sys.box_len]).collect();
            let w = sys.walker(pos, 0);
            if w.e_local.is_finite() {
                return w;
            }
        }
    }

    #[test]
    fn free_model_has_zero_energy() {
        let p = PotentialModel::free();
        let sys = System::exact(p, GuidingParams { match_radius: 1.0 }, 10, 0.1).unwrap();
        let w = random_walker(&sys, 1);
        assert_eq!(w.e_local, 0.0);
        assert_eq!(w.log_psi, 0.0);
    }

    /// ln Ψ, its gradient and Laplacian against central differences.
    fn fd_check<P: PairJastrow>(sys: &System<P>, seeds: std::ops::Range<u64>) {
        let e = 1e-4;
        for seed in seeds {
            let w = random_walker(sys, seed);
            let mut lap = 0.0;
            let mut max_err: f64 = 0.0;
            for k in 0..sys.n {
                for c in 0..2 {
                    let shifted = |h: f64| {
                        let mut p = w.positions.clone();
                        p[k][c] += h;
                        sys.walker(p, 0).log_psi
                    };
                    let (lp, lm, lp2, lm2) = (shifted(e), shifted(-e), shifted(2.0 * e), shifted(-2.0 * e));
                    let grad = (8.0 * (lp - lm) - (lp2 - lm2)) / (12.0 * e);
                    let scale = w.drift[k][c].abs().max(1.0);
                    max_err = max_err.max((grad - w.drift[k][c]).abs() / scale);
                    lap += (-lp2 + 16.0 * lp - 30.0 * w.log_psi + 16.0 * lm - lm2) / (12.0 * e * e);
                }
            }
            assert!(max_err < 1e-6, "seed {seed}: gradient error {max_err}");
            // rebuild E_L from the numeric Laplacian
            let v: f64 = (0..sys.n)
                .flat_map(|i| (0..i).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let r = sys.separation(&w.positions[i], &w.positions[j]).2;
                    sys.pair.terms(r).v
                })
                .sum();
            let g2: f64 = w.drift.iter().map(|f| f[0] * f[0] + f[1] * f[1]).sum();
            let e_fd = -0.5 * (lap + g2) + v + sys.tail_energy();
            assert!((e_fd - w.e_local).abs() < 1e-4 * w.e_local.abs().max(1.0), "seed {seed}: {e_fd} vs {}", w.e_local);
        }
    }

    #[test]
    fn derivatives_match_finite_differences_dipolar() {
        let sys = System::exact(PotentialModel::dipolar(1.0), GuidingParams { match_radius: 3.0 }, 12, 0.0625).unwrap();
        fd_check(&sys, 0..20);
    }

    #[test]
    fn derivatives_match_finite_differences_hard_disk() {
        let sys = System::exact(PotentialModel::hard_disk(1.0), GuidingParams { match_radius: 3.0 }, 10, 0.05).unwrap();
        fd_check(&sys, 100..105);
    }

    #[test]
    fn energy_continuous_at_joint() {
        let p = PotentialModel::dipolar(1.0);
        let sys = System::exact(p, GuidingParams { match_radius: 3.0 }, 2, 0.0625 / 8.0).unwrap();
        let rm = 3.0;
        let at = |r: f64| sys.walker(vec![[1.0, 1.0], [1.0 + r, 1.0]], 0).e_local;
        let (below, above) = (at(rm * (1.0 - 1e-12)), at(rm * (1.0 + 1e-12)));
        assert!((below - above).abs() < 1e-8, "{below} vs {above}");
    }

    #[test]
    fn table_and_exact_agree() {
        let p = PotentialModel::dipolar(1.0);
        let g = GuidingParams { match_radius: 4.0 };
        let exact = System::exact(p, g, 20, 0.0625).unwrap();
        let table = System::tabulated(p, g, 20, 0.0625).unwrap();
        for seed in 0..5 {
            let w = random_walker(&exact, seed);
            let t = table.walker(w.positions.clone(), 0);
            assert!((w.e_local - t.e_local).abs() < 1e-7 * w.e_local.abs());
            assert!((w.log_psi - t.log_psi).abs() < 1e-8 * w.log_psi.abs().max(1.0));
        }
    }

    #[test]
    fn incremental_update_matches_full() {
        let sys = System::tabulated(PotentialModel::dipolar(1.0), GuidingParams { match_radius: 4.0 }, 16, 0.0625).unwrap();
        let mut w = random_walker(&sys, 3);
        let mut s = MoveScratch::new(sys.n);
        let mut rng = stream(1, Domain::Init, 0, 5);
        for k in 0..sys.n {
            let to = [sys.fold(w.positions[k][0] + rng.random::<f64>() - 0.5), sys.fold(w.positions[k][1] + 0.3)];
            let mv = sys.propose(&w, k, &to, &mut s).unwrap();
            let du = sys.delta_log_psi(&w, k, &to).unwrap();
            assert!((du - mv.delta_u).abs() < 1e-10);
            sys.accept(&mut w, k, to, &mv, &s);
        }
        let fresh = sys.walker(w.positions.clone(), 0);
        assert!((fresh.log_psi - w.log_psi).abs() < 1e-9);
        for (a, b) in fresh.drift.iter().zip(&w.drift) {
            assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn overlap_gives_infinite_energy() {
        let sys = System::exact(PotentialModel::hard_disk(1.0), GuidingParams { match_radius: 3.0 }, 2, 0.01).unwrap();
        let w = sys.walker(vec![[1.0, 1.0], [1.5, 1.0]], 0);
        assert_eq!(w.e_local, f64::INFINITY);
        assert!(sys.overlaps(&w.positions));
        let mut s = MoveScratch::new(2);
        let ok = sys.walker(vec![[1.0, 1.0], [4.0, 1.0]], 0);
        assert!(sys.propose(&ok, 1, &[1.2, 1.3], &mut s).is_none());
        assert!(sys.delta_log_psi(&ok, 1, &[1.2, 1.3]).is_none());
    }

    #[test]
    fn local_energy_entry_point() {
        let p = PotentialModel::dipolar(1.0);
        let g = GuidingParams { match_radius: 3.0 };
        let sys = System::exact(p, g, 8, 0.0625).unwrap();
        let w = random_walker(&sys, 4);
        assert_eq!(local_energy(&p, &g, 0.0625, &w).unwrap(), w.e_local);
    }
}
