//! Variational and diffusion Monte Carlo for N bosons in a periodic square.
//!
//! Units: ħ²/m = 1, lengths in the units of the potential range, energies
//! reported per particle.

use thiserror::Error;

pub mod config;
pub mod diffusion;
pub mod guiding;
pub mod io;
pub mod potential;
pub mod rng;
pub mod stats;
pub mod system;
pub mod vmc;

pub use config::{DmcConfig, RunConfig};
pub use diffusion::{dmc_run, dmc_sample, dmc_sample_from, DmcResult};
pub use guiding::{pair_guiding, GuidingParams, PairGuiding, PairJastrow, PairTable, PairTerms};
pub use io::RunRecord;
pub use potential::{scattering_length_check, PotentialKind, PotentialModel};
pub use stats::{blocking, extrapolate_size, extrapolate_timestep, EnergyEstimate, EstimateTag};
pub use system::{local_energy, System, Walker};
pub use vmc::{vmc_run, vmc_sample, VmcResult};

#[derive(Debug, Error)]
pub enum DmcError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("need at least 2 distinct points, found {found}")]
    InsufficientData { found: usize },
    #[error("population control failed at step {step}: {population} walkers for a target of {target}")]
    Population { step: usize, population: usize, target: usize },
    #[error("i/o: {0}")]
    Io(String),
}
