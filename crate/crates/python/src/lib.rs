//! Python bindings for `qcomb_core`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qcomb_core::comb::{beta2_from_dispersion_parameter as beta2_from_d, dispersion_phase_shift as phase_shift, DEFAULT_WAVELENGTH_NM};
use qcomb_core::config;
use qcomb_core::experiment;
use qcomb_core::modulation::{BinIndex, OutputBin};
use qcomb_core::numerics;
use qcomb_core::runner::{self, RunOptions};
use qcomb_core::{CombGrid, CombState, ErrorCategory, FiberSpec, ShaperMask};

fn to_py(e: qcomb_core::Error) -> PyErr {
    let message = format!("{} error: {e}", e.category().as_str());
    match e.category() {
        ErrorCategory::Scenario => PyRuntimeError::new_err(message),
        _ => PyValueError::new_err(message),
    }
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

/// J_n(x) for |n| <= 200, 0 <= x <= 50.
#[pyfunction]
fn bessel_j(n: i32, x: f64) -> PyResult<f64> {
    numerics::bessel_j(n, x).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (target, order = 1))]
fn solve_depth_for_power(target: f64, order: i32) -> PyResult<f64> {
    numerics::solve_depth_for_power(target, order).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (ratio, order_a = 3, order_b = 1))]
fn solve_depth_for_ratio(ratio: f64, order_a: i32, order_b: i32) -> PyResult<f64> {
    numerics::solve_depth_for_ratio(ratio, order_a, order_b).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (samples, period = std::f64::consts::TAU))]
fn unwrap_phase(samples: Vec<f64>, period: f64) -> Vec<f64> {
    numerics::unwrap_phase(&samples, period)
}

/// Returns a dict with slope, intercept, slope_stderr and residual_rms.
#[pyfunction]
#[pyo3(signature = (x, y, weights = None))]
fn fit_line<'py>(py: Python<'py>, x: Vec<f64>, y: Vec<f64>, weights: Option<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let fit = numerics::fit_line(&x, &y, weights.as_deref()).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("slope", fit.slope)?;
    d.set_item("intercept", fit.intercept)?;
    d.set_item("slope_stderr", fit.slope_stderr)?;
    d.set_item("residual_rms", fit.residual_rms)?;
    Ok(d)
}

/// Fringe shift in rad between pairs at `f_os` and `f_os + fsr` (THz).
#[pyfunction]
fn dispersion_phase_shift(beta2: f64, length: f64, fsr: f64, f_os: f64) -> f64 {
    phase_shift(beta2, length, fsr, f_os)
}

/// β₂ in ps²/m from D in ps/(nm·km).
#[pyfunction]
#[pyo3(signature = (d, wavelength_nm = DEFAULT_WAVELENGTH_NM))]
fn beta2_from_dispersion_parameter(d: f64, wavelength_nm: f64) -> f64 {
    beta2_from_d(d, wavelength_nm)
}

#[pyfunction]
fn entanglement_verdict<'py>(py: Python<'py>, visibility: f64, sigma: f64, dimension: u32) -> PyResult<Bound<'py, PyDict>> {
    let v = experiment::entanglement_verdict(visibility, sigma, dimension).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("visibility", v.visibility)?;
    d.set_item("sigma", v.sigma)?;
    d.set_item("dimension", v.dimension)?;
    d.set_item("threshold", v.threshold)?;
    d.set_item("entangled", v.entangled)?;
    d.set_item("entangled_central", v.entangled_central)?;
    Ok(d)
}

/// Parses a scenario document and returns its canonical text.
#[pyfunction]
fn validate_config(text: &str) -> PyResult<String> {
    let cfg = config::parse_config(text).map_err(to_py)?;
    Ok(config::to_canonical_string(&cfg))
}

/// Runs a scenario document. Returns `(tables, summary)` where `tables`
/// maps file names to CSV text.
#[pyfunction]
#[pyo3(signature = (text, seed = None, noiseless = false))]
fn run_scenario<'py>(
    py: Python<'py>,
    text: &str,
    seed: Option<u64>,
    noiseless: bool,
) -> PyResult<(Bound<'py, PyDict>, Bound<'py, PyAny>)> {
    let cfg = config::parse_config(text).map_err(to_py)?;
    let opts = RunOptions::from_env(noiseless, seed).map_err(to_py)?;
    let out = runner::run_scenario(&cfg, &opts).map_err(to_py)?;
    let tables = PyDict::new(py);
    for (name, body) in &out.tables {
        tables.set_item(name, body)?;
    }
    let summary = json_to_py(py, &serde_json::Value::Object(out.summary))?;
    Ok((tables, summary))
}

/// Normalised biphoton frequency comb.
#[pyclass(name = "Comb", module = "qcomb")]
struct PyComb {
    inner: CombState,
}

#[pymethods]
impl PyComb {
    #[new]
    #[pyo3(signature = (num_pairs, fsr = 0.036, center_frequency = 194.55, linewidth = None, amplitudes = None))]
    fn new(
        num_pairs: usize,
        fsr: f64,
        center_frequency: f64,
        linewidth: Option<f64>,
        amplitudes: Option<Vec<Complex64>>,
    ) -> PyResult<Self> {
        let grid = CombGrid::new(center_frequency, fsr, linewidth.unwrap_or(fsr / 3.0), num_pairs)
            .map_err(to_py)?;
        let inner = match amplitudes {
            Some(a) => CombState::build(grid, &a).map_err(to_py)?,
            None => CombState::flat(grid),
        };
        Ok(Self { inner })
    }

    #[getter]
    fn num_pairs(&self) -> usize {
        self.inner.grid().num_pairs
    }

    #[getter]
    fn fsr(&self) -> f64 {
        self.inner.grid().fsr
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    /// Copy with `phase` split evenly over the signal and idler of `pair`.
    fn with_pair_phase(&self, pair: usize, phase: f64) -> PyResult<Self> {
        let mask = ShaperMask::identity(self.inner.grid().num_pairs)
            .with_pair_phase(pair, phase)
            .map_err(to_py)?;
        Ok(Self {
            inner: self.inner.apply_mask(&mask).map_err(to_py)?,
        })
    }

    /// Copy with only `pairs` transmitted.
    fn carve(&self, pairs: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.carve(&pairs).map_err(to_py)?,
        })
    }

    fn apply_dispersion(&self, beta2: f64, length: f64) -> PyResult<Self> {
        let fiber = FiberSpec::new(beta2, length).map_err(to_py)?;
        Ok(Self {
            inner: self.inner.apply_dispersion(&fiber),
        })
    }

    fn temporal_correlation(&self, tau_ps: Vec<f64>) -> Vec<f64> {
        self.inner.temporal_correlation(&tau_ps)
    }

    fn __repr__(&self) -> String {
        format!(
            "Comb(num_pairs={}, fsr={})",
            self.inner.grid().num_pairs,
            self.inner.grid().fsr
        )
    }
}

fn bin(x: f64) -> PyResult<BinIndex> {
    BinIndex::approximate(x)
        .ok_or_else(|| PyValueError::new_err(format!("{x} is not a simple fraction of the FSR")))
}

/// Sinusoidal electro-optic phase modulator.
#[pyclass(name = "Modulator", module = "qcomb")]
struct PyModulator {
    inner: qcomb_core::Modulator,
}

#[pymethods]
impl PyModulator {
    #[new]
    #[pyo3(signature = (depth, mod_frequency = 0.018, max_order = None))]
    fn new(depth: f64, mod_frequency: f64, max_order: Option<u32>) -> PyResult<Self> {
        let m = qcomb_core::Modulator::new(depth, mod_frequency).map_err(to_py)?;
        Ok(Self {
            inner: match max_order {
                Some(n) => m.truncated(n),
                None => m,
            },
        })
    }

    #[getter]
    fn depth(&self) -> f64 {
        self.inner.depth()
    }

    fn sideband_amplitude(&self, n: i64) -> PyResult<f64> {
        self.inner.sideband_amplitude(n).map_err(to_py)
    }

    fn sideband_power_sum(&self) -> f64 {
        self.inner.sideband_power_sum()
    }

    /// Coincidence rate with signal and idler read at the given bins, in
    /// FSR units from the center (e.g. 1.5).
    fn coincidence_rate(&self, comb: &PyComb, signal: f64, idler: f64) -> PyResult<f64> {
        let out = OutputBin::new(bin(signal)?, bin(idler)?);
        self.inner.coincidence_rate(&comb.inner, out).map_err(to_py)
    }

    fn total_output_rate(&self, comb: &PyComb) -> PyResult<f64> {
        self.inner.total_output_rate(&comb.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Modulator(depth={}, mod_frequency={})",
            self.inner.depth(),
            self.inner.mod_frequency()
        )
    }
}

#[pymodule]
fn qcomb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(solve_depth_for_power, m)?)?;
    m.add_function(wrap_pyfunction!(solve_depth_for_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(unwrap_phase, m)?)?;
    m.add_function(wrap_pyfunction!(fit_line, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion_phase_shift, m)?)?;
    m.add_function(wrap_pyfunction!(beta2_from_dispersion_parameter, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(validate_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_class::<PyComb>()?;
    m.add_class::<PyModulator>()?;
    m.add("QUBIT_THRESHOLD", experiment::QUBIT_THRESHOLD)?;
    m.add("QUTRIT_THRESHOLD", experiment::QUTRIT_THRESHOLD)?;
    Ok(())
}
