//! `runs.csv` result log and plain-CSV walker checkpoints.

use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::potential::PotentialKind;
use super::stats::{EnergyEstimate, EstimateTag};
use super::system::Walker;
use super::DmcError;

pub const RUNS_HEADER: [&str; 9] = ["potential", "n_r2", "N", "timestep", "walkers", "mean", "err", "tag", "seed"];

/// One line of `runs.csv`. Extrapolated rows leave `timestep` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub potential: String,
    pub n_r2: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub timestep: Option<f64>,
    pub walkers: usize,
    pub mean: f64,
    pub err: f64,
    pub tag: EstimateTag,
    pub seed: u64,
}

impl RunRecord {
    pub fn new(
        potential: PotentialKind,
        n_r2: f64,
        n: usize,
        timestep: Option<f64>,
        walkers: usize,
        e: &EnergyEstimate,
        seed: u64,
    ) -> Self {
        Self { potential: potential.name().into(), n_r2, n, timestep, walkers, mean: e.mean, err: e.err, tag: e.tag, seed }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> DmcError {
    DmcError::Io(format!("{}: {e}", path.display()))
}

/// Appends records, writing the header when the file is new or empty.
pub fn append_runs(path: &Path, records: &[RunRecord]) -> Result<(), DmcError> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        w.write_record(RUNS_HEADER).map_err(|e| io_err(path, e))?;
    }
    for r in records {
        w.write_record([
            r.potential.clone(),
            format!("{:.16e}", r.n_r2),
            r.n.to_string(),
            r.timestep.map(|t| format!("{t:.16e}")).unwrap_or_default(),
            r.walkers.to_string(),
            format!("{:.16e}", r.mean),
            format!("{:.16e}", r.err),
            r.tag.name().to_string(),
            r.seed.to_string(),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_runs<R: Read>(reader: R) -> Result<Vec<RunRecord>, DmcError> {
    let mut rdr = csv::Reader::from_reader(reader);
    rdr.deserialize().map(|r| r.map_err(|e| DmcError::Io(e.to_string()))).collect()
}

/// Checkpoint rows: walker, lineage, particle, x, y.
pub fn write_checkpoint<W: Write>(out: W, walkers: &[Walker]) -> Result<(), DmcError> {
    let mut w = csv::Writer::from_writer(out);
    let e = |e: csv::Error| DmcError::Io(e.to_string());
    w.write_record(["walker", "lineage", "particle", "x", "y"]).map_err(e)?;
    for (i, wk) in walkers.iter().enumerate() {
        for (k, p) in wk.positions.iter().enumerate() {
            w.write_record([
                i.to_string(),
                wk.lineage.to_string(),
                k.to_string(),
                format!("{:.17e}", p[0]),
                format!("{:.17e}", p[1]),
            ])
            .map_err(e)?;
        }
    }
    w.flush().map_err(|e| DmcError::Io(e.to_string()))
}

#[derive(Deserialize)]
struct CheckpointRow {
    walker: usize,
    lineage: u64,
    particle: usize,
    x: f64,
    y: f64,
}

/// Walker positions from a checkpoint. Cached quantities are left empty and
/// must be recomputed by the consumer.
pub fn read_checkpoint<R: Read>(reader: R) -> Result<Vec<Walker>, DmcError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut walkers: Vec<Walker> = Vec::new();
    for (line, row) in rdr.deserialize::<CheckpointRow>().enumerate() {
        let row = row.map_err(|e| DmcError::Io(e.to_string()))?;
        let bad = || DmcError::Io(format!("checkpoint row {}: walker/particle indices out of order", line + 1));
        if row.particle == 0 {
            if row.walker != walkers.len() {
                return Err(bad());
            }
            walkers.push(Walker { positions: Vec::new(), lineage: row.lineage, log_psi: 0.0, drift: Vec::new(), e_local: 0.0 });
        }
        let count = walkers.len();
        let w = walkers.last_mut().ok_or_else(bad)?;
        if row.walker + 1 != count || row.particle != w.positions.len() || row.lineage != w.lineage {
            return Err(bad());
        }
        w.positions.push([row.x, row.y]);
    }
    if walkers.is_empty() {
        return Err(DmcError::Io("empty checkpoint".into()));
    }
    let n = walkers[0].positions.len();
    if walkers.iter().any(|w| w.positions.len() != n) {
        return Err(DmcError::Io("checkpoint walkers differ in particle count".into()));
    }
    Ok(walkers)
}
