//! Python bindings: fields, preset codes, repair, distance reports,
//! structural checks and rate bounds.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lrclab::bounds::{self, Q};
use lrclab::evalcode::{ErasurePattern, EvalCode};
use lrclab::galois;
use lrclab::presets::{self, DistanceOptions, Preset, PresetError};
use lrclab::structure;

fn runtime<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn value<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn preset_err(e: PresetError) -> PyErr {
    match e {
        PresetError::Unknown(_) | PresetError::OutOfRange { .. } => value(e),
        _ => runtime(e),
    }
}

/// GF(2^m) with elements as integer bitmasks.
#[pyclass(frozen)]
struct Field {
    inner: galois::Field,
}

impl Field {
    fn check(&self, a: u32) -> PyResult<u32> {
        if self.inner.contains(a) {
            Ok(a)
        } else {
            Err(PyValueError::new_err(format!("{a:#x} is not in {}", self.inner)))
        }
    }
}

#[pymethods]
impl Field {
    #[new]
    #[pyo3(signature = (m, modulus=None))]
    fn new(m: u32, modulus: Option<u32>) -> PyResult<Self> {
        Ok(Field { inner: galois::Field::new(m, modulus).map_err(value)? })
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.degree()
    }

    #[getter]
    fn size(&self) -> u64 {
        self.inner.size()
    }

    #[getter]
    fn modulus(&self) -> u32 {
        self.inner.modulus()
    }

    #[getter]
    fn generator(&self) -> u32 {
        self.inner.generator()
    }

    fn add(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.inner.add(self.check(a)?, self.check(b)?))
    }

    fn mul(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.inner.mul(self.check(a)?, self.check(b)?))
    }

    fn inv(&self, a: u32) -> PyResult<u32> {
        self.inner.inv(self.check(a)?).map_err(value)
    }

    fn pow(&self, a: u32, e: u64) -> PyResult<u32> {
        Ok(self.inner.pow(self.check(a)?, e))
    }

    /// Elements in canonical order: 0, then powers of the generator.
    fn elements(&self) -> Vec<u32> {
        self.inner.elements()
    }

    fn power_notation(&self, a: u32) -> PyResult<String> {
        Ok(self.inner.power_notation(self.check(a)?))
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.inner)
    }
}

/// A preset evaluation code.
#[pyclass(frozen)]
struct Code {
    preset: Preset,
    inner: EvalCode,
}

#[pymethods]
impl Code {
    #[new]
    fn new(preset: &str) -> PyResult<Self> {
        let preset = Preset::parse(preset).map_err(preset_err)?;
        let inner = preset.build().map_err(preset_err)?;
        Ok(Code { preset, inner })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.preset.name
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn k_nominal(&self) -> usize {
        self.inner.nominal_dimension()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.locality()
    }

    #[getter]
    fn monomial_box(&self) -> Vec<u32> {
        self.preset.bounds.clone()
    }

    #[getter]
    fn field_degree(&self) -> u32 {
        self.inner.field().degree()
    }

    fn places(&self) -> Vec<Vec<u32>> {
        self.inner.places().places().iter().map(|p| p.coords.clone()).collect()
    }

    /// Rows of the basis matrix, `k x n`.
    fn basis_matrix(&self) -> Vec<Vec<u32>> {
        self.inner.basis_matrix().iter_rows().map(|r| r.to_vec()).collect()
    }

    fn encode(&self, message: Vec<u32>) -> PyResult<Vec<u32>> {
        if let Some(&a) = message.iter().find(|&&a| !self.inner.field().contains(a)) {
            return Err(PyValueError::new_err(format!("{a:#x} is not a field element")));
        }
        self.inner.encode(&message).map_err(value)
    }

    /// Rebuilds `word[position]` from its recovery set; `None` marks erasures.
    fn repair(&self, word: Vec<Option<u32>>, position: usize) -> PyResult<u32> {
        let pattern = ErasurePattern { symbols: word, target: position };
        self.inner.repair(&pattern).map_err(value)
    }

    fn recovery_set(&self, position: usize) -> PyResult<Vec<usize>> {
        if position >= self.inner.len() {
            return Err(PyValueError::new_err(format!("position {position} out of range")));
        }
        Ok(self.inner.repair_index().fiber(position))
    }

    #[pyo3(signature = (budget=1u128 << 24, samples=0, seed=0))]
    fn distance<'py>(&self, py: Python<'py>, budget: u128, samples: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let opts = DistanceOptions { budget, sample_trials: samples, seed, ..Default::default() };
        let report = py
            .detach(|| presets::distance_report(&self.preset, &self.inner, &opts))
            .map_err(preset_err)?;
        let d = PyDict::new(py);
        d.set_item("n", report.n)?;
        d.set_item("k", report.k)?;
        d.set_item("d_lower", report.d_lower)?;
        d.set_item("d_upper", report.d_upper)?;
        d.set_item("exact", report.exact)?;
        d.set_item("notes", report.notes)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Code({}, n={}, k={}, r={})", self.preset.name, self.n(), self.k(), self.r())
    }
}

/// Runs the structural checks at `q`; returns (name, status) pairs.
#[pyfunction]
fn verify(q: u64) -> PyResult<Vec<(String, String)>> {
    let results = structure::verify_all(q).map_err(value)?;
    Ok(results
        .into_iter()
        .map(|r| {
            let status = status_name(&r.status);
            (r.proposition_id.name().to_string(), status)
        })
        .collect())
}

fn status_name(s: &structure::CheckStatus) -> String {
    match s {
        structure::CheckStatus::Passed => "passed",
        structure::CheckStatus::Failed => "failed",
        structure::CheckStatus::HypothesisNotMet => "hypothesis-not-met",
    }
    .to_string()
}

fn exact_delta(delta: f64) -> PyResult<Q> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(PyValueError::new_err(format!("delta = {delta} is outside [0, 1]")));
    }
    Q::approximate_float(delta).ok_or_else(|| PyValueError::new_err("delta is not representable"))
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[pyfunction]
fn btv_threshold(r: u64, q: u64, delta: f64) -> PyResult<f64> {
    Ok(to_f64(bounds::btv_threshold(r, q, exact_delta(delta)?).map_err(value)?))
}

#[pyfunction]
fn paper_threshold(r: u64, q: u64, delta: f64) -> PyResult<f64> {
    Ok(to_f64(bounds::paper_threshold(r, q, exact_delta(delta)?).map_err(value)?))
}

#[pyfunction]
#[pyo3(signature = (r, q, delta, tol=1e-9))]
fn gv_threshold(r: u64, q: u64, delta: f64, tol: f64) -> PyResult<f64> {
    Ok(bounds::gv_threshold(r, q, delta, tol).map_err(value)?.rate)
}

/// CSV of the table rows and, unless disabled, the sweep at `q`.
#[pyfunction]
#[pyo3(signature = (q, sweep=true))]
fn scatter_csv(q: u64, sweep: bool) -> PyResult<String> {
    if !(4..=1024).contains(&q) || !q.is_power_of_two() {
        return Err(PyValueError::new_err(format!("q = {q} must be a power of two in 4..=1024")));
    }
    let mut points = bounds::table_rows(q);
    if sweep {
        points.extend(bounds::cor38_sweep(q));
    }
    Ok(bounds::scatter_csv(&bounds::scatter(&points, q).map_err(value)?))
}

#[pyfunction]
fn table_errata(q: u64) -> Vec<String> {
    bounds::table_errata(q)
}

#[pyfunction]
fn preset_families() -> Vec<&'static str> {
    presets::FAMILIES.to_vec()
}

#[pymodule]
#[pyo3(name = "lrclab")]
fn lrclab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Code>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(btv_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(paper_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(gv_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(scatter_csv, m)?)?;
    m.add_function(wrap_pyfunction!(table_errata, m)?)?;
    m.add_function(wrap_pyfunction!(preset_families, m)?)?;
    Ok(())
}
