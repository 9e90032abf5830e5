//! Run parameters and the key-value run file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::guiding::GuidingParams;
use super::potential::{PotentialKind, PotentialModel};
use super::DmcError;

/// Parameters of one VMC or DMC run.
#[derive(Debug, Clone, PartialEq)]
pub struct DmcConfig {
    pub n_particles: usize,
    /// Units range⁻².
    pub density: f64,
    pub timestep: f64,
    pub target_walkers: usize,
    pub equil_blocks: usize,
    pub measure_blocks: usize,
    pub steps_per_block: usize,
    pub seed: u64,
    pub guiding: GuidingParams,
}

impl DmcConfig {
    /// Defaults sized for a desk run; the match radius is box/4.
    pub fn new(n_particles: usize, density: f64) -> Self {
        let box_len = (n_particles as f64 / density).sqrt();
        Self {
            n_particles,
            density,
            timestep: 0.01,
            target_walkers: 100,
            equil_blocks: 10,
            measure_blocks: 50,
            steps_per_block: 50,
            seed: 1,
            guiding: GuidingParams::default_for_box(box_len),
        }
    }

    pub fn box_len(&self) -> f64 {
        (self.n_particles as f64 / self.density).sqrt()
    }

    pub fn validate(&self, p: &PotentialModel) -> Result<(), DmcError> {
        p.validate()?;
        let bad = |m: String| Err(DmcError::Config(m));
        if self.n_particles < 2 {
            return bad(format!("n_particles must be at least 2, got {}", self.n_particles));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return bad(format!("density must be positive, got {}", self.density));
        }
        if !(self.timestep > 0.0 && self.timestep.is_finite()) {
            return bad(format!("timestep must be positive, got {}", self.timestep));
        }
        if self.target_walkers == 0 || self.measure_blocks == 0 || self.steps_per_block == 0 {
            return bad("target_walkers, measure_blocks and steps_per_block must be positive".into());
        }
        let half = 0.5 * self.box_len();
        let rm = self.guiding.match_radius;
        if !(rm > p.core() && rm < half) {
            return bad(format!("match_radius {rm} must lie in ({}, {half})", p.core()));
        }
        if p.kind == PotentialKind::HardDisk {
            // close packing of disks in 2D
            let packing = std::f64::consts::PI * p.range * p.range * self.density / 4.0;
            if packing > 0.5 {
                return bad(format!("hard-disk packing fraction {packing:.3} too high"));
            }
        }
        Ok(())
    }

    /// Rough E_L scale per particle, used for the timestep sanity warning.
    pub(crate) fn energy_scale(&self, p: &PotentialModel) -> f64 {
        match p.kind {
            PotentialKind::Free => 0.0,
            // mean-field estimate 4πn/|ln na²| with a floor on the log
            _ => {
                let a = p.scattering_length().unwrap_or(p.range);
                let l = (self.density * a * a).ln().abs().max(1.0);
                4.0 * std::f64::consts::PI * self.density / l
            }
        }
    }
}

fn default_range() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

/// Contents of a run file. One DMC run is made per entry of `timesteps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: String,
    #[serde(default = "default_range")]
    pub range: f64,
    pub n_particles: usize,
    pub density: f64,
    pub timesteps: Vec<f64>,
    pub target_walkers: usize,
    pub equil_blocks: usize,
    pub measure_blocks: usize,
    pub steps_per_block: usize,
    pub seed: u64,
    /// Absolute match radius; box/4 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_radius: Option<f64>,
    #[serde(default = "default_true")]
    pub run_vmc: bool,
    /// Reference energy per particle to compare against, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, DmcError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| DmcError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, DmcError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DmcError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn potential_model(&self) -> Result<PotentialModel, DmcError> {
        let kind: PotentialKind = self.potential.parse().map_err(DmcError::Config)?;
        Ok(PotentialModel { kind, range: self.range })
    }

    /// Per-timestep configurations.
    pub fn runs(&self) -> Vec<DmcConfig> {
        self.timesteps.iter().map(|&t| self.at_timestep(t)).collect()
    }

    pub fn at_timestep(&self, timestep: f64) -> DmcConfig {
        let mut c = DmcConfig::new(self.n_particles, self.density);
        c.timestep = timestep;
        c.target_walkers = self.target_walkers;
        c.equil_blocks = self.equil_blocks;
        c.measure_blocks = self.measure_blocks;
        c.steps_per_block = self.steps_per_block;
        c.seed = self.seed;
        if let Some(rm) = self.match_radius {
            c.guiding.match_radius = rm;
        }
        c
    }

    pub fn validate(&self) -> Result<(), DmcError> {
        let p = self.potential_model()?;
        if self.timesteps.is_empty() {
            return Err(DmcError::Config("timesteps: at least one value required".into()));
        }
        let mut seen = self.timesteps.clone();
        seen.sort_by(f64::total_cmp);
        seen.dedup();
        if seen.len() != self.timesteps.len() {
            return Err(DmcError::Config("timesteps: values must be distinct".into()));
        }
        for c in self.runs() {
            c.validate(&p)?;
        }
        Ok(())
    }
}

pub const DESK_2M4: &str = include_str!("../../data/desk_2m4.cfg");
pub const DESK_2M4_SMOKE: &str = include_str!("../../data/desk_2m4_smoke.cfg");
