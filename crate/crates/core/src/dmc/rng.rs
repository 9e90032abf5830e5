//! Counter-style random streams: every (seed, lineage, step) triple owns an
//! independent ChaCha generator, so results never depend on which thread
//! advanced a walker.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purpose, mixed into the key so VMC, DMC and initialisation never
/// share numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Init = 1,
    Vmc = 2,
    Dmc = 3,
}

pub fn stream(seed: u64, domain: Domain, lineage: u64, step: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    key[16..24].copy_from_slice(&lineage.to_le_bytes());
    key[24..].copy_from_slice(&step.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Lineage id of the `copy`-th extra copy made of `parent` at `step`.
pub fn child_lineage(parent: u64, step: u64, copy: u64) -> u64 {
    splitmix(splitmix(parent ^ splitmix(step)) ^ copy)
}
