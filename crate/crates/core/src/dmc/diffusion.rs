//! Importance-sampled diffusion Monte Carlo.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::config::DmcConfig;
use super::guiding::PairJastrow;
use super::potential::PotentialModel;
use super::rng::{child_lineage, stream, Domain};
use super::stats::{blocking, EnergyEstimate, EstimateTag};
use super::system::{MoveScratch, System, Vec2, Walker};
use super::vmc::equilibrated_walkers;
use super::DmcError;

/// Population feedback strength: the log population error is corrected over
/// 1/POPULATION_GAIN steps.
pub const POPULATION_GAIN: f64 = 0.1;
/// Memory of the reference-energy running average, in steps.
const REFERENCE_MEMORY: f64 = 50.0;
/// Largest E_T offset from the reference energy, relative.
const FEEDBACK_CLIP: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct DmcResult {
    pub estimate: EnergyEstimate,
    /// Mixed estimate of E/N at every measured step.
    pub trace: Vec<f64>,
    pub populations: Vec<usize>,
    /// Fraction of accepted drift–diffusion moves.
    pub acceptance: f64,
    /// Timestep scaled by the accepted diffusion fraction.
    pub effective_timestep: f64,
    pub walkers: Vec<Walker>,
}

/// Umrigar-style drift cap: v → v·(√(1 + 2aτv²) − 1)/(aτv²).
#[inline]
fn limited_drift(f: Vec2, tau: f64) -> Vec2 {
    const A: f64 = 0.5;
    let v2 = f[0] * f[0] + f[1] * f[1];
    let x = A * tau * v2;
    if x < 1e-10 {
        return f;
    }
    let s = ((1.0 + 2.0 * x).sqrt() - 1.0) / x;
    [f[0] * s, f[1] * s]
}

struct StepOutcome {
    weight: f64,
    xi: f64,
    e_new: f64,
    accepted: u64,
    proposed: u64,
    r2_accepted: f64,
    r2_proposed: f64,
    overlap: bool,
}

/// One drift–diffusion sweep with Metropolis correction; then weight.
fn advance<P: PairJastrow>(
    sys: &System<P>,
    w: &mut Walker,
    scratch: &mut MoveScratch,
    tau: f64,
    tau_eff: f64,
    e_trial: f64,
    seed: u64,
    step: u64,
) -> StepOutcome {
    let mut rng = stream(seed, Domain::Dmc, w.lineage, step);
    let sqrt_tau = tau.sqrt();
    let e_old = w.e_local;
    let mut out = StepOutcome {
        weight: 0.0,
        xi: 0.0,
        e_new: 0.0,
        accepted: 0,
        proposed: 0,
        r2_accepted: 0.0,
        r2_proposed: 0.0,
        overlap: false,
    };
    for k in 0..sys.n {
        let chi = [sqrt_tau * rng.sample::<f64, _>(StandardNormal), sqrt_tau * rng.sample::<f64, _>(StandardNormal)];
        let xi: f64 = rng.random();
        let v_old = limited_drift(w.drift[k], tau);
        let disp = [tau * v_old[0] + chi[0], tau * v_old[1] + chi[1]];
        let to = [sys.fold(w.positions[k][0] + disp[0]), sys.fold(w.positions[k][1] + disp[1])];
        let chi2 = chi[0] * chi[0] + chi[1] * chi[1];
        out.proposed += 1;
        out.r2_proposed += chi2;
        // a move into a hard core is rejected outright
        let Some(mv) = sys.propose(w, k, &to, scratch) else { continue };
        let v_new = limited_drift(mv.drift_new, tau);
        let back = [-disp[0] - tau * v_new[0], -disp[1] - tau * v_new[1]];
        let log_ratio = 2.0 * mv.delta_u - (back[0] * back[0] + back[1] * back[1] - chi2) / (2.0 * tau);
        if xi < log_ratio.exp() {
            sys.accept(w, k, to, &mv, scratch);
            out.accepted += 1;
            out.r2_accepted += chi2;
        }
    }
    sys.evaluate(w);
    if cfg!(debug_assertions) && sys.pair.core() > 0.0 {
        assert!(!sys.overlaps(&w.positions), "hard-core overlap in walker {}", w.lineage);
    }
    out.overlap = !w.e_local.is_finite();
    out.e_new = w.e_local;
    out.weight = (-tau_eff * (0.5 * (e_old + w.e_local) - e_trial)).exp();
    out.xi = rng.random();
    out
}

/// Drift–diffusion–branching run from equilibrated VMC walkers.
pub fn dmc_sample(c: &DmcConfig, p: &PotentialModel) -> Result<DmcResult, DmcError> {
    c.validate(p)?;
    let sys = System::tabulated(*p, c.guiding, c.n_particles, c.density)?;
    let walkers = equilibrated_walkers(&sys, c);
    propagate(&sys, c, p, walkers)
}

/// Continues from given walkers (e.g. a checkpoint).
pub fn dmc_sample_from(c: &DmcConfig, p: &PotentialModel, walkers: Vec<Walker>) -> Result<DmcResult, DmcError> {
    c.validate(p)?;
    let sys = System::tabulated(*p, c.guiding, c.n_particles, c.density)?;
    let walkers = walkers
        .into_iter()
        .map(|w| {
            if w.positions.len() != c.n_particles {
                return Err(DmcError::Config(format!(
                    "walker has {} particles, config expects {}",
                    w.positions.len(),
                    c.n_particles
                )));
            }
            let w = sys.walker(w.positions, w.lineage);
            if !w.e_local.is_finite() {
                return Err(DmcError::Config(format!("walker {} has overlapping particles", w.lineage)));
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if walkers.is_empty() {
        return Err(DmcError::Config("no walkers to continue from".into()));
    }
    propagate(&sys, c, p, walkers)
}

fn propagate<P: PairJastrow>(
    sys: &System<P>,
    c: &DmcConfig,
    p: &PotentialModel,
    mut walkers: Vec<Walker>,
) -> Result<DmcResult, DmcError> {
    let n = sys.n as f64;
    let tau = c.timestep;
    let target = c.target_walkers as f64;
    let scale = c.energy_scale(p);
    if tau * scale > 0.1 {
        log::warn!("timestep {tau} is large for an energy scale of {scale:.3e} per particle");
    }
    let mean_e = |ws: &[Walker]| ws.iter().map(|w| w.e_local).sum::<f64>() / ws.len() as f64;
    let mut e_ref = mean_e(&walkers);
    let mut e_trial = e_ref;
    let mut tau_eff = tau;
    let (mut r2_acc, mut r2_prop) = (0.0, 0.0);
    let (mut n_acc, mut n_prop) = (0u64, 0u64);
    let mut scratch: Vec<MoveScratch> = Vec::new();
    let equil_steps = c.equil_blocks * c.steps_per_block;
    let total_steps = equil_steps + c.measure_blocks * c.steps_per_block;
    let mut trace = Vec::with_capacity(total_steps - equil_steps);
    let mut weights = Vec::with_capacity(total_steps - equil_steps);
    let mut populations = Vec::with_capacity(total_steps - equil_steps);
    for step in 0..total_steps {
        scratch.resize_with(walkers.len(), || MoveScratch::new(sys.n));
        let outcomes: Vec<StepOutcome> = walkers
            .par_iter_mut()
            .zip(scratch.par_iter_mut())
            .map(|(w, s)| advance(sys, w, s, tau, tau_eff, e_trial, c.seed, step as u64))
            .collect();
        if let Some(o) = outcomes.iter().position(|o| o.overlap) {
            return Err(DmcError::Numeric(format!("walker {} reached an overlapping configuration", walkers[o].lineage)));
        }
        let mut sum_w = 0.0;
        let mut sum_we = 0.0;
        for o in &outcomes {
            sum_w += o.weight;
            sum_we += o.weight * o.e_new;
            r2_acc += o.r2_accepted;
            r2_prop += o.r2_proposed;
            n_acc += o.accepted;
            n_prop += o.proposed;
        }
        let e_mixed = sum_we / sum_w;
        if step >= equil_steps {
            trace.push(e_mixed / n);
            weights.push(sum_w);
        }
        tau_eff = if r2_prop > 0.0 { tau * r2_acc / r2_prop } else { tau };
        // integer splitting floor(w + ξ); count first so a runaway weight
        // aborts instead of allocating
        let copies: Vec<u64> = outcomes.iter().map(|o| (o.weight + o.xi).floor() as u64).collect();
        let pop = copies.iter().fold(0u64, |a, &k| a.saturating_add(k));
        if (pop as f64) < 0.1 * target || (pop as f64) > 10.0 * target {
            return Err(DmcError::Population { step, population: pop as usize, target: c.target_walkers });
        }
        let mut next = Vec::with_capacity(pop as usize);
        for (w, &k) in walkers.into_iter().zip(&copies) {
            for j in 1..k {
                let mut child = w.clone();
                child.lineage = child_lineage(w.lineage, step as u64, j);
                next.push(child);
            }
            if k > 0 {
                next.push(w);
            }
        }
        walkers = next;
        let pop = walkers.len();
        if step >= equil_steps {
            populations.push(pop);
        }
        let alpha = 1.0 / REFERENCE_MEMORY.min(step as f64 + 1.0);
        e_ref += alpha * (e_mixed - e_ref);
        let clip = FEEDBACK_CLIP * e_ref.abs();
        let feedback = (POPULATION_GAIN * (target / pop as f64).ln() / tau).clamp(-clip, clip);
        e_trial = e_ref + feedback;
    }
    let mean = trace.iter().zip(&weights).map(|(e, w)| e * w).sum::<f64>() / weights.iter().sum::<f64>();
    let b = blocking(&trace);
    Ok(DmcResult {
        estimate: EnergyEstimate { mean, err: b.err(), tag: EstimateTag::DmcMixed },
        trace,
        populations,
        acceptance: n_acc as f64 / n_prop.max(1) as f64,
        effective_timestep: tau_eff,
        walkers,
    })
}

/// Blocked mixed-estimator energy per particle.
pub fn dmc_run(c: &DmcConfig, p: &PotentialModel) -> Result<EnergyEstimate, DmcError> {
    dmc_sample(c, p).map(|r| r.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmc::guiding::GuidingParams;
    use crate::dmc::vmc::vmc_run;

    fn small(n: usize, density: f64) -> DmcConfig {
        let mut c = DmcConfig::new(n, density);
        c.target_walkers = 20;
        c.equil_blocks = 2;
        c.measure_blocks = 10;
        c.steps_per_block = 20;
        c.timestep = 0.05;
        c
    }

    #[test]
    fn free_particles_have_zero_energy() {
        let r = dmc_sample(&small(9, 0.1), &PotentialModel::free()).unwrap();
        assert_eq!((r.estimate.mean, r.estimate.err), (0.0, 0.0));
        assert!(r.populations.iter().all(|&p| p == 20));
    }

    #[test]
    fn traces_independent_of_thread_count() {
        let c = small(12, 0.0625);
        let p = PotentialModel::dipolar(1.0);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| dmc_sample(&c, &p).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.trace.len(), 200);
        assert!(a.trace.iter().zip(&b.trace).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(a.populations, b.populations);
        // a different seed changes the trace
        let mut c2 = c.clone();
        c2.seed += 1;
        assert_ne!(dmc_sample(&c2, &p).unwrap().trace, a.trace);
    }

    #[test]
    fn hard_disks_never_overlap() {
        // na² = 1e-3; the per-step overlap assertion is active in debug builds
        let p = PotentialModel::hard_disk(1.0);
        let mut c = small(8, 1e-3);
        c.target_walkers = 4;
        c.equil_blocks = 0;
        c.measure_blocks = 100;
        c.steps_per_block = 100;
        c.timestep = 0.5;
        c.guiding = GuidingParams { match_radius: 20.0 };
        let r = dmc_sample(&c, &p).unwrap();
        assert_eq!(r.trace.len(), 10_000);
        let sys = System::exact(p, c.guiding, c.n_particles, c.density).unwrap();
        assert!(r.walkers.iter().all(|w| !sys.overlaps(&w.positions)));
        assert!(r.estimate.mean > 0.0);
    }

    #[test]
    fn variational_ordering_small() {
        let p = PotentialModel::dipolar(1.0);
        let mut c = small(16, 0.0625);
        c.measure_blocks = 40;
        c.timestep = 0.02;
        let v = vmc_run(&c, &p).unwrap();
        let d = dmc_run(&c, &p).unwrap();
        assert!(v.mean >= d.mean - 2.0 * v.err.hypot(d.err), "vmc {v} dmc {d}");
    }

    #[test]
    fn population_collapse_aborts() {
        // with an absurd timestep single weights span many decades
        let p = PotentialModel::dipolar(1.0);
        let mut c = small(16, 0.0625);
        c.timestep = 50.0;
        c.target_walkers = 10;
        assert!(matches!(dmc_sample(&c, &p), Err(DmcError::Population { .. })));
    }

    #[test]
    fn restart_from_walkers() {
        let p = PotentialModel::dipolar(1.0);
        let c = small(9, 0.0625);
        let first = dmc_sample(&c, &p).unwrap();
        let again = dmc_sample_from(&c, &p, first.walkers.clone()).unwrap();
        assert!(again.estimate.mean.is_finite());
        let mut wrong = first.walkers.clone();
        wrong[0].positions.pop();
        assert!(dmc_sample_from(&c, &p, wrong).is_err());
        assert!(dmc_sample_from(&c, &p, Vec::new()).is_err());
    }
}
