//! Reference DMC energies for dipoles, and the CSV format that carries them.

use std::f64::consts::PI;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eos::{EosError, GasParameter};

/// Bundled thermodynamic-limit energies, units ħ²/(m r₀²).
pub const TABLE1_CSV: &str = include_str!("../data/table1_dipoles.csv");

#[derive(Debug, Error)]
pub enum DataError {
    #[error("malformed reference data: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {reason}")]
    Invalid { row: usize, reason: String },
    #[error("no data rows")]
    Empty,
}

/// One measured energy per particle: density nr₀², E/N and its one-σ error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub n_r02: f64,
    pub e_per_n: f64,
    pub err: f64,
}

impl ReferenceRow {
    pub fn gas(&self) -> Result<GasParameter, EosError> {
        GasParameter::from_density_dipoles(self.n_r02)
    }

    /// ε = (E/N)/(2π n r₀²) with ħ²/m = 1.
    pub fn epsilon(&self) -> f64 {
        self.e_per_n / (2.0 * PI * self.n_r02)
    }

    pub fn epsilon_err(&self) -> f64 {
        self.err / (2.0 * PI * self.n_r02)
    }

    /// σ of 1/ε, propagated as (1/ε)·(err/E).
    pub fn inverse_epsilon_err(&self) -> f64 {
        self.err / self.e_per_n / self.epsilon()
    }
}

/// Parses `n_r02,e_per_n,err` rows.
pub fn read_reference_csv<R: Read>(reader: R) -> Result<Vec<ReferenceRow>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize().enumerate() {
        let row: ReferenceRow = rec?;
        if !(row.n_r02 > 0.0 && row.e_per_n > 0.0 && row.err > 0.0) {
            return Err(DataError::Invalid { row: i + 1, reason: "all columns must be positive".into() });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(rows)
}

/// The bundled dipolar reference energies.
pub fn table1() -> Vec<ReferenceRow> {
    read_reference_csv(TABLE1_CSV.as_bytes()).expect("bundled table parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_shape() {
        let rows = table1();
        assert_eq!(rows.len(), 40);
        assert!(rows.iter().all(|r| r.err / r.e_per_n < 1e-2));
        assert_eq!(rows[0], ReferenceRow { n_r02: 0.0625, e_per_n: 0.23338, err: 0.00009 });
        let last = rows.last().unwrap();
        assert_eq!((last.n_r02, last.e_per_n, last.err), (1e-100, 2.7251e-102, 0.0010e-102));
        // powers of two are stored exactly
        assert_eq!(rows[28].n_r02, 2f64.powi(-32));
    }

    #[test]
    fn epsilon_conversion() {
        let row = table1().into_iter().find(|r| r.n_r02 == 1e-20).unwrap();
        assert!((row.epsilon() - 0.022326).abs() < 1e-6);
        assert!((row.inverse_epsilon_err() - 0.0096).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(read_reference_csv("n_r02,e_per_n,err\n".as_bytes()), Err(DataError::Empty)));
        assert!(read_reference_csv("n_r02,e_per_n,err\n1e-3,-1,0.1\n".as_bytes()).is_err());
        assert!(read_reference_csv("n_r02,e_per_n,err\n1e-3,abc,0.1\n".as_bytes()).is_err());
    }
}
