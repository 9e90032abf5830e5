//! The `bose2d` command line.
//!
//! Every command produces an [`OutputRecord`] written as CSV (with a
//! `# schema: <id>` comment line) or JSON. Exit codes: 0 success, 2 a
//! scientific check failed, 64 usage, 65 bad data, 70 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dmc::io::{append_runs, write_checkpoint};
use crate::dmc::{dmc_sample, extrapolate_timestep, vmc_sample, DmcError, EnergyEstimate, RunConfig, RunRecord};
use crate::eos::{
    fig1_ordinate, fit_c3, theory_correction, universal_energy_correction, EosError, FitWindow,
    GasParameter, Theory, UniversalConstants,
};
use crate::reference::{read_reference_csv, table1, DataError, ReferenceRow};
use crate::trap::{breathing_frequency_with_step, EosChoice, TrapConfig, DEFAULT_DERIVATIVE_STEP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NUMERIC: i32 = 70;

/// Directory for files the commands write (runs log, checkpoints, `--out`).
pub const OUT_DIR_ENV: &str = "BOSE2D_OUT_DIR";

/// ln|ln na²| from which the universal expansion is expected to hold.
pub const REGIME_LN_L: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Null,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl<E> From<Result<f64, E>> for Cell {
    fn from(r: Result<f64, E>) -> Self {
        r.map(Cell::Num).unwrap_or(Cell::Null)
    }
}

/// A table with a declared schema.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub schema_id: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form remarks, emitted as `#` lines in CSV.
    pub notes: Vec<String>,
}

impl OutputRecord {
    pub fn new(schema_id: &str, columns: Vec<String>) -> Self {
        Self { schema_id: format!("{schema_id}/v1"), columns, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the columns");
        self.rows.push(row);
    }

    fn note(&mut self, s: String) {
        if !self.notes.contains(&s) {
            self.notes.push(s);
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# schema: {}\n", self.schema_id);
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => format!("{x:.16e}"),
                Cell::Text(t) => t.clone(),
                Cell::Null => String::new(),
            }))
            .expect("in-memory write");
        }
        s.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        s
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(x) => json!(x),
                            Cell::Text(t) => json!(t),
                            Cell::Null => Value::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "schema": self.schema_id, "columns": self.columns, "notes": self.notes, "rows": rows })
    }

    fn render(&self, f: Format) -> String {
        match f {
            Format::Csv => self.to_csv(),
            Format::Json => format!("{:#}\n", self.to_json()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "bose2d", version, about = "Dilute 2D Bose gas: equations of state, DMC and trapped-gas breathing mode")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of stdout (relative paths go under $BOSE2D_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate D(L) = 1/ε − L for the selected theories.
    Eos {
        /// Comma-separated theory names, or `all`.
        #[arg(long, default_value = "all")]
        theories: String,
        /// ln|ln na²| grid as start:stop:step (inclusive).
        #[arg(long = "lnL", allow_hyphen_values = true)]
        ln_l: String,
        /// Second-order constant of the universal expansion.
        #[arg(long, default_value_t = -0.3, allow_hyphen_values = true)]
        c2_mu: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Compare reference energies with every theory and the universal form.
    Compare {
        /// n_r02,e_per_n,err file; the bundled dipolar table when omitted.
        data: Option<PathBuf>,
        #[arg(long, default_value_t = -0.3, allow_hyphen_values = true)]
        c2_mu: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Fit the cubic coefficient of the Cherny–Mora–Pricoupenko energy.
    FitC3 {
        data: Option<PathBuf>,
        /// Use rows with na² at or below this value.
        #[arg(long, default_value_t = 1e-6)]
        window: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run VMC/DMC from a run file and append results to runs.csv.
    Dmc {
        config: PathBuf,
        /// Validate and echo the configuration without running.
        #[arg(long)]
        dry_run: bool,
        /// Write the final walkers of the last run to this CSV.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Breathing-mode frequency of the trapped gas over an LDA-parameter sweep.
    Breathing {
        /// mf_linear[:g], mf_schick or universal.
        #[arg(long)]
        eos: String,
        /// log₁₀ of the LDA parameter √N r₀²/a_ho² as start:stop:step.
        #[arg(long = "log10-lda", allow_hyphen_values = true, default_value = "-10:-2:0.5")]
        log10_lda: String,
        #[arg(long, default_value_t = 1e4)]
        n_particles: f64,
        /// Relative step in ω² for the sum-rule derivative.
        #[arg(long, default_value_t = DEFAULT_DERIVATIVE_STEP)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
}

/// A failed command: exit code plus message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

impl From<EosError> for Failure {
    fn from(e: EosError) -> Self {
        let code = match e {
            EosError::InsufficientData { .. } => EXIT_DATA,
            EosError::Domain { .. } => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        fail(code, e.to_string())
    }
}

impl From<DmcError> for Failure {
    fn from(e: DmcError) -> Self {
        let code = match e {
            DmcError::Config(_) => EXIT_USAGE,
            DmcError::Io(_) | DmcError::InsufficientData { .. } => EXIT_DATA,
            DmcError::Numeric(_) | DmcError::Population { .. } => EXIT_NUMERIC,
        };
        fail(code, e.to_string())
    }
}

/// Inclusive grid from `start:stop:step`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, h] = parts[..] else {
        return Err(format!("grid '{spec}' must be start:stop:step"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("grid '{spec}': '{s}' is not a number"));
    let (a, b, h) = (num(a)?, num(b)?, num(h)?);
    if !(h > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
        return Err(format!("grid '{spec}' needs start ≤ stop and a positive step"));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(format!("grid '{spec}' has too many points"));
    }
    Ok((0..=n).map(|i| a + i as f64 * h).collect())
}

fn parse_theories(s: &str) -> Result<Vec<Theory>, Failure> {
    if s.trim() == "all" {
        return Ok(Theory::ALL.to_vec());
    }
    s.split(',').map(|t| t.trim().parse::<Theory>().map_err(|e| fail(EXIT_USAGE, e))).collect()
}

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn resolve(path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_dir().join(path)
    }
}

fn load_rows(data: Option<&Path>) -> Result<Vec<ReferenceRow>, Failure> {
    let Some(path) = data else { return Ok(table1()) };
    let file = File::open(path).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    read_reference_csv(file).map_err(|e| match e {
        DataError::Empty => fail(EXIT_USAGE, format!("{}: no data rows", path.display())),
        e => fail(EXIT_DATA, format!("{}: {e}", path.display())),
    })
}

fn cmd_eos(theories: &str, grid: &str, c2_mu: f64) -> Result<OutputRecord, Failure> {
    let theories = parse_theories(theories)?;
    let grid = parse_grid(grid).map_err(|e| fail(EXIT_USAGE, e))?;
    let k = UniversalConstants::with_c2_mu(c2_mu);
    let (lo, hi) = (k.shifted(-1.0), k.shifted(1.0));
    let mut columns = vec!["ln_lnna2".to_string(), "L".to_string()];
    columns.extend(theories.iter().map(|t| format!("D_{t}")));
    columns.extend(["universal".into(), "universal_c2_lo".into(), "universal_c2_hi".into()]);
    let mut rec = OutputRecord::new("eos", columns);
    for &x in &grid {
        let g = GasParameter::from_l(x.exp()).map_err(Failure::from)?;
        let mut row = vec![Cell::Num(x), Cell::Num(g.l())];
        for t in &theories {
            match theory_correction(t.spec(), g) {
                Ok(d) => row.push(Cell::Num(d)),
                Err(e) => {
                    rec.note(format!("D_{t} null: {e}"));
                    row.push(Cell::Null);
                }
            }
        }
        for k in [&k, &lo, &hi] {
            match universal_energy_correction(g, k) {
                Ok(d) => row.push(Cell::Num(d)),
                Err(e) => {
                    rec.note(format!("universal null: {e}"));
                    row.push(Cell::Null);
                }
            }
        }
        rec.push(row);
    }
    Ok(rec)
}

/// Returns the record and whether every in-regime row agrees within 3σ.
fn cmd_compare(data: Option<&Path>, c2_mu: f64) -> Result<(OutputRecord, bool), Failure> {
    let rows = load_rows(data)?;
    let k = UniversalConstants::with_c2_mu(c2_mu);
    let mut columns: Vec<String> =
        ["n_r02", "L", "ln_lnna2", "ordinate", "ordinate_err"].iter().map(|s| s.to_string()).collect();
    columns.extend(Theory::ALL.iter().map(|t| format!("D_{t}")));
    columns.extend(["universal", "deviation_sigma", "within_3sigma"].iter().map(|s| s.to_string()));
    let mut rec = OutputRecord::new("compare", columns);
    let mut all_ok = true;
    for r in &rows {
        let g = r.gas().map_err(|e| fail(EXIT_DATA, format!("row n_r02 = {}: {e}", r.n_r02)))?;
        let y = fig1_ordinate(r.epsilon(), g).map_err(Failure::from)?;
        let sigma = r.inverse_epsilon_err();
        let mut row = vec![r.n_r02.into(), g.l().into(), g.ln_l().into(), y.into(), sigma.into()];
        row.extend(Theory::ALL.iter().map(|t| Cell::from(theory_correction(t.spec(), g))));
        match universal_energy_correction(g, &k) {
            Ok(d) => {
                let dev = (y - d) / sigma;
                let ok = dev.abs() <= 3.0;
                if g.ln_l() >= REGIME_LN_L && !ok {
                    all_ok = false;
                }
                row.extend([d.into(), dev.into(), Cell::Num(f64::from(u8::from(ok)))]);
            }
            Err(_) => row.extend([Cell::Null, Cell::Null, Cell::Null]),
        }
        rec.push(row);
    }
    rec.notes.push(format!(
        "ordinate = 1/eps - L; rows with ln_lnna2 >= {REGIME_LN_L} must agree with the universal form within 3 sigma"
    ));
    rec.notes.push(if all_ok { "in-regime agreement: pass".into() } else { "in-regime agreement: FAIL".into() });
    Ok((rec, all_ok))
}

fn cmd_fit_c3(data: Option<&Path>, window: f64) -> Result<OutputRecord, Failure> {
    if !(window > 0.0) {
        return Err(fail(EXIT_USAGE, format!("window must be positive, got {window}")));
    }
    let rows = load_rows(data)?;
    let fit = fit_c3(&rows, FitWindow { max_na2: window })?;
    let mut rec = OutputRecord::new("fit_c3", ["c3", "c3_err", "chi2_per_dof", "rows_used", "window_na2"].map(String::from).to_vec());
    rec.push(vec![fit.c3.into(), fit.c3_err.into(), fit.chi2_per_dof.into(), (fit.rows_used as f64).into(), window.into()]);
    Ok(rec)
}

fn estimate_row(cfg: &RunConfig, timestep: Option<f64>, e: &EnergyEstimate) -> Vec<Cell> {
    let mut row = vec![
        Cell::Text(e.tag.name().into()),
        timestep.map(Cell::Num).unwrap_or(Cell::Null),
        e.mean.into(),
        e.err.into(),
    ];
    row.push(cfg.reference.map(|r| Cell::Num((e.mean - r) / r)).unwrap_or(Cell::Null));
    row
}

fn cmd_dmc(path: &Path, dry_run: bool, checkpoint: Option<&Path>) -> Result<OutputRecord, Failure> {
    let cfg = RunConfig::load(path)?;
    let p = cfg.potential_model()?;
    let mut rec = OutputRecord::new("dmc", ["tag", "timestep", "mean", "err", "rel_dev_reference"].map(String::from).to_vec());
    if dry_run {
        rec.notes.extend(cfg.to_toml().lines().map(String::from));
        rec.notes.push("dry run: configuration valid, nothing computed".into());
        return Ok(rec);
    }
    let density = cfg.density;
    let record = |t: Option<f64>, e: &EnergyEstimate| {
        RunRecord::new(p.kind, density * p.range * p.range, cfg.n_particles, t, cfg.target_walkers, e, cfg.seed)
    };
    let mut log = Vec::new();
    if cfg.run_vmc {
        log::info!("vmc: N = {}, {} walkers", cfg.n_particles, cfg.target_walkers);
        let v = vmc_sample(&cfg.at_timestep(cfg.timesteps[0]), &p)?;
        if let Some(w) = &v.warning {
            rec.note(w.clone());
        }
        rec.push(estimate_row(&cfg, None, &v.estimate));
        log.push(record(None, &v.estimate));
    }
    let mut points = Vec::new();
    let mut last = None;
    for c in cfg.runs() {
        log::info!("dmc: timestep {}", c.timestep);
        let r = dmc_sample(&c, &p)?;
        rec.note(format!(
            "timestep {}: acceptance {:.4}, effective timestep {:.6}",
            c.timestep, r.acceptance, r.effective_timestep
        ));
        rec.push(estimate_row(&cfg, Some(c.timestep), &r.estimate));
        log.push(record(Some(c.timestep), &r.estimate));
        points.push((c.timestep, r.estimate));
        last = Some(r);
    }
    if points.len() >= 2 {
        let x = extrapolate_timestep(&points)?;
        rec.push(estimate_row(&cfg, None, &x));
        log.push(record(None, &x));
    }
    let dir = out_dir();
    append_runs(&dir.join("runs.csv"), &log)?;
    if let (Some(cp), Some(r)) = (checkpoint, last) {
        let cp = resolve(cp);
        let f = File::create(&cp).map_err(|e| fail(EXIT_DATA, format!("{}: {e}", cp.display())))?;
        write_checkpoint(f, &r.walkers)?;
    }
    Ok(rec)
}

fn cmd_breathing(eos: &str, grid: &str, n_particles: f64, step: f64) -> Result<OutputRecord, Failure> {
    let eos: EosChoice = eos.parse().map_err(|e: String| fail(EXIT_USAGE, e))?;
    let grid = parse_grid(grid).map_err(|e| fail(EXIT_USAGE, e))?;
    if !(n_particles > 0.0) {
        return Err(fail(EXIT_USAGE, "n-particles must be positive"));
    }
    let mut rec = OutputRecord::new("breathing", ["log10_lda", "lda_param", "omega2_ratio"].map(String::from).to_vec());
    rec.notes.push(format!("eos = {}, N = {n_particles}", eos));
    for x in grid {
        let lda = 10f64.powf(x);
        let t = TrapConfig::from_lda_parameter(n_particles, lda, eos);
        let ratio = breathing_frequency_with_step(&t, step).map_err(|e| fail(EXIT_NUMERIC, e.to_string()))?;
        rec.push(vec![x.into(), lda.into(), ratio.into()]);
    }
    Ok(rec)
}

fn emit(rec: &OutputRecord, common: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let text = rec.render(common.format);
    match &common.out {
        Some(p) => {
            let p = resolve(p);
            std::fs::write(&p, text).map_err(|e| fail(EXIT_DATA, format!("{}: {e}", p.display())))
        }
        None => out.write_all(text.as_bytes()).map_err(|e| fail(EXIT_DATA, e.to_string())),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Eos { theories, ln_l, c2_mu, common } => {
            cmd_eos(theories, ln_l, *c2_mu).and_then(|r| emit(&r, common, out)).map(|_| EXIT_OK)
        }
        Command::Compare { data, c2_mu, common } => cmd_compare(data.as_deref(), *c2_mu).and_then(|(r, ok)| {
            emit(&r, common, out)?;
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }),
        Command::FitC3 { data, window, common } => {
            cmd_fit_c3(data.as_deref(), *window).and_then(|r| emit(&r, common, out)).map(|_| EXIT_OK)
        }
        Command::Dmc { config, dry_run, checkpoint, common } => {
            cmd_dmc(config, *dry_run, checkpoint.as_deref()).and_then(|r| emit(&r, common, out)).map(|_| EXIT_OK)
        }
        Command::Breathing { eos, log10_lda, n_particles, step, common } => {
            cmd_breathing(eos, log10_lda, *n_particles, *step).and_then(|r| emit(&r, common, out)).map(|_| EXIT_OK)
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "bose2d: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("bose2d").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1:5:0.1").unwrap().len(), 41);
        assert_eq!(parse_grid("-10:-2:0.5").unwrap().len(), 17);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        for bad in ["1:5", "5:1:0.1", "1:5:0", "a:5:1", "1:5:-1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn eos_table() {
        let (code, out, _) = call(&["eos", "--theories", "cherny_mora_pricoupenko,popov", "--lnL", "1:5:0.1"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines[0], "ln_lnna2,L,D_cherny_mora_pricoupenko,D_popov,universal,universal_c2_lo,universal_c2_hi");
        assert_eq!(lines.len(), 42);
        assert!(out.starts_with("# schema: eos/v1\n"));
    }

    #[test]
    fn eos_nulls_outside_validity() {
        let (code, out, _) = call(&["eos", "--theories", "pilati_fit,schick", "--lnL", "1:4:0.5", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        for row in v["rows"].as_array().unwrap() {
            let x = row[0].as_f64().unwrap();
            assert_eq!(row[2].is_null(), !(x > 1.5 && x < 2.8), "ln L = {x}");
            assert_eq!(row[3].as_f64(), Some(0.0));
        }
        assert!(v["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("D_pilati_fit")));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["eos", "--theories", "bogus", "--lnL", "1:2:1"]).0, EXIT_USAGE);
        assert_eq!(call(&["eos", "--lnL", "1:2"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["breathing", "--eos", "quantum_foam"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
        assert_eq!(call(&["--version"]).0, EXIT_OK);
    }

    #[test]
    fn fit_command() {
        let (code, out, _) = call(&["fit-c3", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let c3 = v["rows"][0][0].as_f64().unwrap();
        assert!((1.7..=2.3).contains(&c3));
        assert_eq!(call(&["fit-c3", "--window", "1e-200"]).0, EXIT_DATA);
    }

    #[test]
    fn compare_bundled() {
        let (code, out, _) = call(&["compare"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("in-regime agreement: pass"));
    }

    #[test]
    fn breathing_linear_is_flat() {
        let (code, out, _) = call(&["breathing", "--eos", "mf_linear", "--log10-lda", "-6:-2:2", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        for row in v["rows"].as_array().unwrap() {
            assert!((row[2].as_f64().unwrap() - 4.0).abs() < 1e-3);
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut rec = OutputRecord::new("t", vec!["a".into(), "b".into()]);
        let xs = [std::f64::consts::PI, 1.0 / 3.0, -2.5e-300, 6.02214076e23];
        for &x in &xs {
            rec.push(vec![x.into(), Cell::Null]);
        }
        let text = rec.to_csv();
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let back: Vec<f64> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
        assert_eq!(back, xs);
    }
}
