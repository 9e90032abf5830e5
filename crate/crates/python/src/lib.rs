//! Python bindings for `bose2d`.
//!
//! Errors in the inputs raise `ValueError`; numerical failures (no
//! convergence, population collapse) raise `RuntimeError`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use bose2d::dmc::{self, DmcConfig, DmcError, PotentialKind, PotentialModel};
use bose2d::eos::{self, EosError, FitWindow, Theory, UniversalConstants};
use bose2d::reference::{table1, ReferenceRow};
use bose2d::specfun::{self, SpecfunError};
use bose2d::trap::{self, EosChoice, TrapConfig, TrapError};

fn eos_err(e: EosError) -> PyErr {
    match e {
        EosError::Convergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn specfun_err(e: SpecfunError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dmc_err(e: DmcError) -> PyErr {
    match e {
        DmcError::Config(_) | DmcError::InsufficientData { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn trap_err(e: TrapError) -> PyErr {
    match e {
        TrapError::Config(_) | TrapError::Model { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// The gas parameter na², held as ln(na²) so extreme dilution is exact.
#[pyclass(frozen, skip_from_py_object, name = "GasParameter")]
#[derive(Clone, Copy)]
struct PyGasParameter(eos::GasParameter);

#[pymethods]
impl PyGasParameter {
    #[staticmethod]
    fn from_na2(na2: f64) -> PyResult<Self> {
        eos::GasParameter::from_na2(na2).map(Self).map_err(eos_err)
    }

    #[staticmethod]
    fn from_log_na2(log_na2: f64) -> PyResult<Self> {
        eos::GasParameter::from_log_na2(log_na2).map(Self).map_err(eos_err)
    }

    /// From L = |ln na²|.
    #[staticmethod]
    fn from_l(l: f64) -> PyResult<Self> {
        eos::GasParameter::from_l(l).map(Self).map_err(eos_err)
    }

    /// From the dipolar density n r0², with a = 3.17222 r0.
    #[staticmethod]
    fn from_density_dipoles(n_r02: f64) -> PyResult<Self> {
        eos::GasParameter::from_density_dipoles(n_r02).map(Self).map_err(eos_err)
    }

    #[getter]
    fn log_na2(&self) -> f64 {
        self.0.log_na2()
    }

    #[getter(L)]
    fn l(&self) -> f64 {
        self.0.l()
    }

    #[getter(ln_L)]
    fn ln_l(&self) -> f64 {
        self.0.ln_l()
    }

    fn __repr__(&self) -> String {
        format!("GasParameter(log_na2={})", self.0.log_na2())
    }
}

#[pyfunction]
fn gamma_upper_zero(x: f64) -> PyResult<f64> {
    specfun::gamma_upper_zero(x).map_err(specfun_err)
}

#[pyfunction]
fn gamma_upper_zero_scaled(x: f64) -> PyResult<f64> {
    specfun::gamma_upper_zero_scaled(x).map_err(specfun_err)
}

#[pyfunction]
fn bessel_k0(x: f64) -> PyResult<f64> {
    specfun::bessel_k0(x).map_err(specfun_err)
}

#[pyfunction]
fn energy_mf_schick(g: &PyGasParameter) -> f64 {
    eos::energy_mf_schick(g.0)
}

#[pyfunction]
fn energy_mf_integrated(g: &PyGasParameter) -> PyResult<f64> {
    eos::energy_mf_integrated(g.0).map_err(eos_err)
}

#[pyfunction]
fn energy_mf_expansion(g: &PyGasParameter) -> PyResult<f64> {
    eos::energy_mf_expansion(g.0).map_err(eos_err)
}

#[pyfunction]
fn theory_names() -> Vec<&'static str> {
    Theory::ALL.iter().map(|t| t.name()).collect()
}

/// Denominator correction D(L) of a named theory, ε = 1/(L + D).
#[pyfunction]
fn theory_correction(name: &str, g: &PyGasParameter) -> PyResult<f64> {
    let t: Theory = name.parse().map_err(PyValueError::new_err)?;
    t.spec().correction(g.0).map_err(eos_err)
}

#[pyfunction]
fn cherny_u(g: &PyGasParameter) -> PyResult<f64> {
    eos::cherny_u(g.0).map_err(eos_err)
}

#[pyfunction]
fn cherny_energy(u: f64, c3: f64) -> f64 {
    eos::cherny_energy(u, c3)
}

#[pyfunction]
#[pyo3(signature = (g, c2_mu = -0.3))]
fn universal_energy(g: &PyGasParameter, c2_mu: f64) -> PyResult<f64> {
    eos::universal_energy(g.0, &UniversalConstants::with_c2_mu(c2_mu)).map_err(eos_err)
}

#[pyfunction]
#[pyo3(signature = (g, c2_mu = -0.3))]
fn universal_mu(g: &PyGasParameter, c2_mu: f64) -> PyResult<f64> {
    eos::universal_mu(g.0, &UniversalConstants::with_c2_mu(c2_mu)).map_err(eos_err)
}

/// log10(na²) at which ln L equals m·ln 4π.
#[pyfunction]
fn characteristic_density(m: f64) -> PyResult<f64> {
    eos::characteristic_density(m).map_err(eos_err)
}

/// Bundled dipolar reference energies as (n_r02, e_per_n, err) tuples.
#[pyfunction]
fn reference_table() -> Vec<(f64, f64, f64)> {
    table1().iter().map(|r| (r.n_r02, r.e_per_n, r.err)).collect()
}

/// χ² fit of c3; `rows` defaults to the bundled table. Returns a dict with
/// c3, c3_err, chi2_per_dof and rows_used.
#[pyfunction]
#[pyo3(signature = (rows = None, max_na2 = 1e-6))]
fn fit_c3<'py>(py: Python<'py>, rows: Option<Vec<(f64, f64, f64)>>, max_na2: f64) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let rows: Vec<ReferenceRow> = match rows {
        Some(rs) => rs.into_iter().map(|(n_r02, e_per_n, err)| ReferenceRow { n_r02, e_per_n, err }).collect(),
        None => table1(),
    };
    let f = eos::fit_c3(&rows, FitWindow { max_na2 }).map_err(eos_err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("c3", f.c3)?;
    d.set_item("c3_err", f.c3_err)?;
    d.set_item("chi2_per_dof", f.chi2_per_dof)?;
    d.set_item("rows_used", f.rows_used)?;
    Ok(d)
}

/// Ω²/ω² of the breathing mode for `eos` in mf_linear[:g], mf_schick, universal.
#[pyfunction]
#[pyo3(signature = (eos, lda_param, n_particles = 1e4, rel_step = trap::DEFAULT_DERIVATIVE_STEP))]
fn breathing_frequency(py: Python<'_>, eos: &str, lda_param: f64, n_particles: f64, rel_step: f64) -> PyResult<f64> {
    let choice: EosChoice = eos.parse().map_err(PyValueError::new_err)?;
    let t = TrapConfig::from_lda_parameter(n_particles, lda_param, choice);
    py.detach(|| trap::breathing_frequency_with_step(&t, rel_step)).map_err(trap_err)
}

fn potential(name: &str, range: f64) -> PyResult<PotentialModel> {
    let kind: PotentialKind = name.parse().map_err(PyValueError::new_err)?;
    Ok(PotentialModel { kind, range })
}

/// Scattering length of a model potential from its zero-energy solution.
#[pyfunction]
#[pyo3(signature = (potential_name, range = 1.0))]
fn scattering_length(potential_name: &str, range: f64) -> PyResult<f64> {
    dmc::scattering_length_check(&potential(potential_name, range)?).map_err(dmc_err)
}

/// Energy per particle with its blocking error.
#[pyclass(frozen, name = "EnergyEstimate")]
struct PyEnergyEstimate {
    #[pyo3(get)]
    mean: f64,
    #[pyo3(get)]
    err: f64,
    #[pyo3(get)]
    tag: &'static str,
}

impl From<dmc::EnergyEstimate> for PyEnergyEstimate {
    fn from(e: dmc::EnergyEstimate) -> Self {
        Self { mean: e.mean, err: e.err, tag: e.tag.name() }
    }
}

#[pymethods]
impl PyEnergyEstimate {
    fn __repr__(&self) -> String {
        format!("EnergyEstimate(mean={}, err={}, tag='{}')", self.mean, self.err, self.tag)
    }
}

#[allow(clippy::too_many_arguments)]
fn config(
    n_particles: usize,
    density: f64,
    timestep: f64,
    walkers: usize,
    equil_blocks: usize,
    measure_blocks: usize,
    steps_per_block: usize,
    seed: u64,
    match_radius: Option<f64>,
) -> DmcConfig {
    let mut c = DmcConfig::new(n_particles, density);
    c.timestep = timestep;
    c.target_walkers = walkers;
    c.equil_blocks = equil_blocks;
    c.measure_blocks = measure_blocks;
    c.steps_per_block = steps_per_block;
    c.seed = seed;
    if let Some(r) = match_radius {
        c.guiding.match_radius = r;
    }
    c
}

/// Variational Monte Carlo energy per particle with the pair-product guiding function.
#[pyfunction]
#[pyo3(signature = (potential_name, n_particles, density, range = 1.0, walkers = 100,
    equil_blocks = 10, measure_blocks = 50, steps_per_block = 50, seed = 1, match_radius = None))]
#[allow(clippy::too_many_arguments)]
fn vmc_run(
    py: Python<'_>,
    potential_name: &str,
    n_particles: usize,
    density: f64,
    range: f64,
    walkers: usize,
    equil_blocks: usize,
    measure_blocks: usize,
    steps_per_block: usize,
    seed: u64,
    match_radius: Option<f64>,
) -> PyResult<PyEnergyEstimate> {
    let p = potential(potential_name, range)?;
    let c = config(n_particles, density, 0.01, walkers, equil_blocks, measure_blocks, steps_per_block, seed, match_radius);
    py.detach(|| dmc::vmc_run(&c, &p)).map(Into::into).map_err(dmc_err)
}

/// Diffusion Monte Carlo mixed estimate of the energy per particle.
#[pyfunction]
#[pyo3(signature = (potential_name, n_particles, density, timestep, range = 1.0, walkers = 100,
    equil_blocks = 10, measure_blocks = 50, steps_per_block = 50, seed = 1, match_radius = None))]
#[allow(clippy::too_many_arguments)]
fn dmc_run(
    py: Python<'_>,
    potential_name: &str,
    n_particles: usize,
    density: f64,
    timestep: f64,
    range: f64,
    walkers: usize,
    equil_blocks: usize,
    measure_blocks: usize,
    steps_per_block: usize,
    seed: u64,
    match_radius: Option<f64>,
) -> PyResult<PyEnergyEstimate> {
    let p = potential(potential_name, range)?;
    let c = config(n_particles, density, timestep, walkers, equil_blocks, measure_blocks, steps_per_block, seed, match_radius);
    py.detach(|| dmc::dmc_run(&c, &p)).map(Into::into).map_err(dmc_err)
}

/// Linear extrapolation to zero timestep of (timestep, mean, err) triples.
#[pyfunction]
fn extrapolate_timestep(points: Vec<(f64, f64, f64)>) -> PyResult<PyEnergyEstimate> {
    let pts: Vec<(f64, dmc::EnergyEstimate)> = points
        .into_iter()
        .map(|(t, mean, err)| (t, dmc::EnergyEstimate { mean, err, tag: dmc::EstimateTag::DmcMixed }))
        .collect();
    dmc::extrapolate_timestep(&pts).map(Into::into).map_err(dmc_err)
}

#[pymodule]
mod pybose2d {
    #[pymodule_export]
    use super::{
        bessel_k0, breathing_frequency, characteristic_density, cherny_energy, cherny_u, dmc_run, energy_mf_expansion,
        energy_mf_integrated, energy_mf_schick, extrapolate_timestep, fit_c3, gamma_upper_zero, gamma_upper_zero_scaled,
        reference_table, scattering_length, theory_correction, theory_names, universal_energy, universal_mu, vmc_run,
        PyEnergyEstimate, PyGasParameter,
    };
}
