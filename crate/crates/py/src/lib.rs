//! Python bindings: closed-form dynamics, exact diagonalization, the
//! Jaynes–Cummings limit and revival analysis. Arrays cross the boundary as
//! plain lists of floats.

use std::f64::consts::FRAC_PI_2;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use central_spin::analysis::{self, RevivalSettings, TimeGrid, TimeSeries};
use central_spin::closed_form::{self as cf, EquatorialPhase, HomogeneousDynamics, ModelParams, QubitState};
use central_spin::dicke::{self, BathSize, CoherentAngle};
use central_spin::ed::{self, CouplingProfile, SpectrumSet};
use central_spin::{jc, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Validation(_) | Error::Capacity { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for central_spin::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn grid(times: Vec<f64>) -> PyResult<TimeGrid> {
    TimeGrid::from_points(times).py()
}

fn rho_dict<'py>(py: Python<'py>, rho: &QubitState) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("rho_upup", rho.a)?;
    d.set_item("rho_updown", (rho.b.re, rho.b.im))?;
    d.set_item("purity", rho.purity())?;
    d.set_item("entropy", rho.von_neumann_entropy())?;
    Ok(d)
}

/// Homogeneous model with a spin coherent bath, evaluated in closed form.
#[pyclass(name = "Homogeneous", frozen)]
struct PyHomogeneous {
    inner: HomogeneousDynamics,
}

#[pymethods]
impl PyHomogeneous {
    #[new]
    #[pyo3(signature = (n, field=1.0, coupling=1.0, longitudinal=1.0, theta=FRAC_PI_2))]
    fn new(n: usize, field: f64, coupling: f64, longitudinal: f64, theta: f64) -> PyResult<Self> {
        let params = ModelParams::new(n, field, coupling, longitudinal).py()?;
        let theta = CoherentAngle::new(theta).py()?;
        Ok(Self {
            inner: HomogeneousDynamics::new(params, theta),
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.params().n.get()
    }

    fn weights(&self) -> Vec<f64> {
        self.inner.weights().weights().to_vec()
    }

    /// Rabi frequencies `Ω_n`, `n = 1..=N`.
    fn frequencies(&self) -> Vec<f64> {
        self.inner.frequencies().rabi.clone()
    }

    fn polarization(&self, t: f64) -> f64 {
        self.inner.polarization(t)
    }

    fn polarization_series(&self, times: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.polarization_series_par(&grid(times)?).py()?.values().to_vec())
    }

    /// `(up, down)` amplitude lists as `(re, im)` pairs, without the global phase.
    fn amplitudes(&self, t: f64) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let table = self.inner.amplitudes(t);
        let pairs = |v: &[central_spin::C64]| v.iter().map(|c| (c.re, c.im)).collect();
        (pairs(&table.up), pairs(&table.down))
    }

    fn density_matrix<'py>(&self, py: Python<'py>, t: f64) -> PyResult<Bound<'py, PyDict>> {
        rho_dict(py, &self.inner.density_matrix(t))
    }

    /// Fidelity with `(|↑⟩ + e^{-iφ}|↓⟩)/√2`.
    fn fidelity(&self, t: f64, phi: f64) -> PyResult<f64> {
        Ok(self.inner.density_matrix(t).fidelity(EquatorialPhase::new(phi).py()?))
    }

    fn revival_time(&self, m: usize) -> PyResult<f64> {
        self.inner.revival_time(m).py()
    }

    /// Best equatorial phase over `times`: `(phi, fidelity, time)`.
    #[pyo3(signature = (times, n_phases=64))]
    fn best_phase(&self, times: Vec<f64>, n_phases: usize) -> PyResult<(f64, f64, f64)> {
        Ok(cf::phase_scan(&self.inner, &times, n_phases).py()?.best())
    }
}

/// Per-spin couplings `A_j`, `Δ_j`.
#[pyclass(name = "Profile", frozen)]
struct PyProfile {
    inner: CouplingProfile,
}

#[pymethods]
impl PyProfile {
    #[staticmethod]
    #[pyo3(signature = (n, coupling=1.0, longitudinal=1.0))]
    fn uniform(n: usize, coupling: f64, longitudinal: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CouplingProfile::uniform(n, coupling, longitudinal).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, alpha, coupling=1.0, longitudinal=1.0))]
    fn exponential(n: usize, alpha: f64, coupling: f64, longitudinal: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CouplingProfile::exponential(n, coupling, longitudinal, alpha).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, alpha, constant, coupling=1.0))]
    fn integrable(n: usize, alpha: f64, constant: f64, coupling: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CouplingProfile::integrable(n, coupling, alpha, constant).py()?,
        })
    }

    #[staticmethod]
    fn explicit(transverse: Vec<f64>, longitudinal: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CouplingProfile::explicit(transverse, longitudinal).py()?,
        })
    }

    #[getter]
    fn transverse(&self) -> Vec<f64> {
        self.inner.transverse().to_vec()
    }

    #[getter]
    fn longitudinal(&self) -> Vec<f64> {
        self.inner.longitudinal().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.bath_size()
    }
}

/// Exact diagonalization from `|↑⟩ ⊗ |θ⟩`.
#[pyclass(name = "ExactDynamics", frozen)]
struct PyExact {
    spectra: SpectrumSet,
    psi: ed::FullState,
}

#[pymethods]
impl PyExact {
    #[new]
    #[pyo3(signature = (profile, field=1.0, theta=FRAC_PI_2, ed_cap=ed::DEFAULT_ED_CAP))]
    fn new(py: Python<'_>, profile: &PyProfile, field: f64, theta: f64, ed_cap: usize) -> PyResult<Self> {
        let n = BathSize::new(profile.inner.bath_size()).py()?;
        let theta = CoherentAngle::new(theta).py()?;
        let profile = profile.inner.clone();
        py.detach(move || {
            let psi = ed::initial_state(n, theta, ed_cap)?;
            let spectra = SpectrumSet::for_state(&profile, field, &psi, ed_cap, None)?;
            Ok(Self { spectra, psi })
        })
        .py()
    }

    fn energies(&self) -> Vec<f64> {
        self.spectra.energies()
    }

    /// Observables on `times`, plus the conservation drifts.
    fn trajectory<'py>(&self, py: Python<'py>, times: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        let grid = grid(times)?;
        let traj = py.detach(|| self.spectra.trajectory(&self.psi, &grid)).py()?;
        let report = ed::conserved_checks(&traj);
        let d = PyDict::new(py);
        d.set_item("t", &traj.times)?;
        d.set_item("sz0", &traj.sz0)?;
        d.set_item("pbath", &traj.pbath)?;
        d.set_item("rho_upup", traj.rho.iter().map(|r| r.a).collect::<Vec<_>>())?;
        d.set_item("rho_updown", traj.rho.iter().map(|r| (r.b.re, r.b.im)).collect::<Vec<_>>())?;
        d.set_item("entropy", traj.rho.iter().map(|r| r.von_neumann_entropy()).collect::<Vec<_>>())?;
        d.set_item("norm_drift", report.norm_drift)?;
        d.set_item("energy_drift", report.energy_drift)?;
        d.set_item("sz_total_drift", report.sz_total_drift)?;
        d.set_item("conserved", report.passed())?;
        Ok(d)
    }
}

/// Detected collapses and revivals of a sampled signal.
#[pyfunction]
#[pyo3(signature = (times, values, min_prominence=analysis::DEFAULT_MIN_PROMINENCE, smooth_window=analysis::DEFAULT_SMOOTH_WINDOW))]
fn detect_revivals<'py>(
    py: Python<'py>,
    times: Vec<f64>,
    values: Vec<f64>,
    min_prominence: f64,
    smooth_window: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let series = TimeSeries::new(times, values, "signal").py()?;
    let settings = RevivalSettings {
        min_prominence,
        smooth_window,
        collapse_gap: None,
    };
    let report = analysis::detect_revivals(&series, settings).py()?;
    let d = PyDict::new(py);
    d.set_item("revival_times", report.revival_times())?;
    d.set_item("collapses", report.collapses.clone())?;
    d.set_item("collapse_gap", report.collapse_gap)?;
    Ok(d)
}

/// Jaynes–Cummings inversion `W(t)` under the correspondence with the given model.
#[pyfunction]
#[pyo3(signature = (times, n, field, coupling, longitudinal, theta, eps_tail=jc::DEFAULT_TAIL))]
fn jc_inversion(
    times: Vec<f64>,
    n: usize,
    field: f64,
    coupling: f64,
    longitudinal: f64,
    theta: f64,
    eps_tail: f64,
) -> PyResult<Vec<f64>> {
    let p = ModelParams::new(n, field, coupling, longitudinal).py()?;
    let params = jc::correspondence(&p, CoherentAngle::new(theta).py()?);
    let w = jc::JcInversion::new(params, eps_tail).py()?;
    Ok(times.iter().map(|&t| w.at(t)).collect())
}

#[pyfunction]
fn coherent_weights(n: usize, theta: f64) -> PyResult<Vec<f64>> {
    let w = dicke::coherent_weights(BathSize::new(n).py()?, CoherentAngle::new(theta).py()?);
    Ok(w.weights().to_vec())
}

#[pyfunction]
fn log_binomial(n: u64, k: u64) -> PyResult<f64> {
    dicke::log_binomial(n, k).py()
}

#[pymodule]
fn central_spin_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHomogeneous>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyExact>()?;
    m.add_function(wrap_pyfunction!(detect_revivals, m)?)?;
    m.add_function(wrap_pyfunction!(jc_inversion, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_weights, m)?)?;
    m.add_function(wrap_pyfunction!(log_binomial, m)?)?;
    Ok(())
}
