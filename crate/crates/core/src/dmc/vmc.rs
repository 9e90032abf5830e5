//! Metropolis sampling of |Ψ|².

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::config::DmcConfig;
use super::guiding::PairJastrow;
use super::potential::PotentialModel;
use super::rng::{stream, Domain};
use super::stats::{blocking, EnergyEstimate, EstimateTag};
use super::system::{System, Walker};
use super::DmcError;

pub const TARGET_ACCEPTANCE: f64 = 0.5;
pub const ACCEPTANCE_WINDOW: (f64, f64) = (0.2, 0.9);

#[derive(Debug, Clone)]
pub struct VmcResult {
    pub estimate: EnergyEstimate,
    /// Chain-averaged E_L per particle at every measured sweep.
    pub trace: Vec<f64>,
    pub acceptance: f64,
    pub step_size: f64,
    /// Set when the acceptance ratio left the tuning window.
    pub warning: Option<String>,
    pub walkers: Vec<Walker>,
}

struct Chain {
    walker: Walker,
    accepted: u64,
    proposed: u64,
}

/// One sweep: every particle gets one Gaussian trial move.
fn sweep<P: PairJastrow>(sys: &System<P>, c: &mut Chain, step: f64, seed: u64, chain_id: u64, sweep_id: u64) {
    let mut rng = stream(seed, Domain::Vmc, chain_id, sweep_id);
    let w = &mut c.walker;
    for k in 0..sys.n {
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        let to = [sys.fold(w.positions[k][0] + step * dx), sys.fold(w.positions[k][1] + step * dy)];
        let xi: f64 = rng.random();
        c.proposed += 1;
        if let Some(du) = sys.delta_log_psi(w, k, &to) {
            if xi < (2.0 * du).exp() {
                w.positions[k] = to;
                w.log_psi += du;
                c.accepted += 1;
            }
        }
    }
}

/// Runs `blocks` blocks of sweeps over all chains; returns the chain-averaged
/// energy per particle of every sweep when `measure` is set.
fn run_blocks<P: PairJastrow>(
    sys: &System<P>,
    chains: &mut [Chain],
    c: &DmcConfig,
    step: &mut f64,
    first_sweep: u64,
    blocks: usize,
    tune: bool,
    measure: bool,
) -> Vec<f64> {
    let mut trace = Vec::new();
    for b in 0..blocks {
        let start = first_sweep + (b * c.steps_per_block) as u64;
        let s = *step;
        let energies: Vec<Vec<f64>> = chains
            .par_iter_mut()
            .enumerate()
            .map(|(i, ch)| {
                let mut es = Vec::new();
                for k in 0..c.steps_per_block as u64 {
                    sweep(sys, ch, s, c.seed, i as u64, start + k);
                    if measure {
                        sys.evaluate(&mut ch.walker);
                        es.push(ch.walker.e_local);
                    }
                }
                es
            })
            .collect();
        if measure {
            let norm = 1.0 / (chains.len() * sys.n) as f64;
            for k in 0..c.steps_per_block {
                trace.push(energies.iter().map(|e| e[k]).sum::<f64>() * norm);
            }
        }
        if tune {
            let (acc, prop) = chains.iter().fold((0, 0), |(a, p), ch| (a + ch.accepted, p + ch.proposed));
            let ratio = acc as f64 / prop.max(1) as f64;
            *step *= (ratio / TARGET_ACCEPTANCE).clamp(0.5, 2.0);
            // cap at half a box: beyond that moves are just random placements
            *step = step.min(0.5 * sys.box_len);
            for ch in chains.iter_mut() {
                ch.accepted = 0;
                ch.proposed = 0;
            }
        }
    }
    trace
}

fn initial_chains<P: PairJastrow>(sys: &System<P>, c: &DmcConfig) -> Vec<Chain> {
    (0..c.target_walkers as u64)
        .map(|i| Chain { walker: sys.initial_walker(c.seed, i), accepted: 0, proposed: 0 })
        .collect()
}

/// Equilibrated walkers drawn from |Ψ|², as DMC starting points.
pub(crate) fn equilibrated_walkers<P: PairJastrow>(sys: &System<P>, c: &DmcConfig) -> Vec<Walker> {
    let mut chains = initial_chains(sys, c);
    let mut step = 0.3 / c.density.sqrt();
    run_blocks(sys, &mut chains, c, &mut step, 0, c.equil_blocks.max(1), true, false);
    chains
        .into_iter()
        .map(|mut ch| {
            sys.evaluate(&mut ch.walker);
            ch.walker
        })
        .collect()
}

pub fn vmc_sample(c: &DmcConfig, p: &PotentialModel) -> Result<VmcResult, DmcError> {
    c.validate(p)?;
    let sys = System::tabulated(*p, c.guiding, c.n_particles, c.density)?;
    let mut chains = initial_chains(&sys, c);
    let mut step = 0.3 / c.density.sqrt();
    run_blocks(&sys, &mut chains, c, &mut step, 0, c.equil_blocks, true, false);
    let first = (c.equil_blocks * c.steps_per_block) as u64;
    let trace = run_blocks(&sys, &mut chains, c, &mut step, first, c.measure_blocks, false, true);
    let (acc, prop) = chains.iter().fold((0, 0), |(a, p), ch| (a + ch.accepted, p + ch.proposed));
    let acceptance = acc as f64 / prop.max(1) as f64;
    let warning = if acceptance < ACCEPTANCE_WINDOW.0 || acceptance > ACCEPTANCE_WINDOW.1 {
        let m = format!("VMC acceptance {acceptance:.3} outside [{}, {}]", ACCEPTANCE_WINDOW.0, ACCEPTANCE_WINDOW.1);
        log::warn!("{m}");
        Some(m)
    } else {
        None
    };
    let b = blocking(&trace);
    Ok(VmcResult {
        estimate: EnergyEstimate { mean: b.mean, err: b.err(), tag: EstimateTag::Vmc },
        trace,
        acceptance,
        step_size: step,
        warning,
        walkers: chains.into_iter().map(|ch| ch.walker).collect(),
    })
}

/// Blocked ⟨E_L⟩ per particle under |Ψ|².
pub fn vmc_run(c: &DmcConfig, p: &PotentialModel) -> Result<EnergyEstimate, DmcError> {
    vmc_sample(c, p).map(|r| r.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmc::guiding::GuidingParams;
    use crate::quad::integrate;

    #[test]
    fn free_particles() {
        let mut c = DmcConfig::new(9, 0.1);
        c.target_walkers = 4;
        c.measure_blocks = 4;
        c.steps_per_block = 5;
        let r = vmc_sample(&c, &PotentialModel::free()).unwrap();
        assert_eq!((r.estimate.mean, r.estimate.err), (0.0, 0.0));
        // every move is accepted, which the tuner flags
        assert!(r.warning.is_some());
    }

    /// Pair-distance histogram for N = 2 against the exact |Ψ|² marginal.
    #[test]
    fn two_body_histogram() {
        let p = PotentialModel::dipolar(1.0);
        let density = 0.02;
        let mut c = DmcConfig::new(2, density);
        c.target_walkers = 40;
        c.steps_per_block = 100;
        c.guiding = GuidingParams { match_radius: 2.5 };
        let sys = System::tabulated(p, c.guiding, 2, density).unwrap();
        let half = 0.5 * sys.box_len;
        let mut chains = initial_chains(&sys, &c);
        let mut step = 1.0;
        run_blocks(&sys, &mut chains, &c, &mut step, 0, 5, true, false);
        const BINS: usize = 10;
        let mut counts = [0u64; BINS + 1];
        let sweeps = 5000u64;
        for (i, ch) in chains.iter_mut().enumerate() {
            for s in 0..sweeps {
                sweep(&sys, ch, step, c.seed, i as u64, 1_000_000 + s);
                let (a, b) = (ch.walker.positions[0], ch.walker.positions[1]);
                let dx = sys.min_image(a[0] - b[0]);
                let dy = sys.min_image(a[1] - b[1]);
                let r = (dx * dx + dy * dy).sqrt();
                counts[((r / half * BINS as f64) as usize).min(BINS)] += 1;
            }
        }
        let f2 = |r: f64| (2.0 * sys.pair.log_f(r)).exp();
        let w = half / BINS as f64;
        let disk: Vec<f64> = (0..BINS)
            .map(|k| integrate(|r| f2(r) * 2.0 * std::f64::consts::PI * r, k as f64 * w, (k + 1) as f64 * w, 1e-14, 1e-11).0)
            .collect();
        // corners of the square beyond the inscribed disk, where f₂ is flat
        let corners = f2(half) * sys.box_len * sys.box_len * (1.0 - std::f64::consts::PI / 4.0);
        let total = disk.iter().sum::<f64>() + corners;
        let samples = (sweeps * chains.len() as u64) as f64;
        // samples within a chain are correlated; allow a generous 6σ
        for k in 0..=BINS {
            let expected = if k < BINS { disk[k] } else { corners } / total;
            let got = counts[k] as f64 / samples;
            let sigma = (expected * (1.0 - expected) / samples).sqrt() * 3.0;
            assert!((got - expected).abs() < 6.0 * sigma + 1e-4, "bin {k}: {got} vs {expected}");
        }
    }

    #[test]
    fn doubling_blocks_scales_error() {
        let p = PotentialModel::dipolar(1.0);
        let mut c = DmcConfig::new(16, 0.0625);
        c.target_walkers = 20;
        c.equil_blocks = 5;
        c.measure_blocks = 40;
        c.steps_per_block = 40;
        let a = vmc_sample(&c, &p).unwrap();
        c.steps_per_block = 80;
        let b = vmc_sample(&c, &p).unwrap();
        let combined = a.estimate.err.hypot(b.estimate.err);
        assert!((a.estimate.mean - b.estimate.mean).abs() < combined, "{} vs {}", a.estimate, b.estimate);
        let ratio = b.estimate.err / a.estimate.err;
        assert!((0.5..0.95).contains(&ratio), "error ratio {ratio}");
        assert!(a.warning.is_none());
        assert!((0.2..0.9).contains(&a.acceptance));
    }
}
