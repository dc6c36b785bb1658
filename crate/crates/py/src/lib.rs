//! Python bindings: `import retarget`.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use retarget_core::dsp::{self, EcgSignal, PtConfig};
use retarget_core::emitter::{self, EmitConfig, Emitter};
use retarget_core::interpreter::Interpreter;
use retarget_core::mapping::Registry;
use retarget_core::mathcore::NumValue;
use retarget_core::pipeline::{self, Engine};
use retarget_core::{compile, corpus, frontend};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load_registry(path: Option<PathBuf>) -> PyResult<Registry> {
    match path {
        Some(p) => Registry::load(&p).map_err(err),
        None => Ok(Registry::builtin_defaults()),
    }
}

fn signal(samples: Vec<f64>, fs: u32) -> PyResult<EcgSignal> {
    EcgSignal::new(samples, fs).map_err(err)
}

/// Converted source text plus its entry symbol.
#[pyclass(name = "EmittedUnit", frozen)]
pub struct PyEmittedUnit {
    inner: emitter::EmittedUnit,
}

#[pymethods]
impl PyEmittedUnit {
    #[getter]
    fn source_text(&self) -> &str {
        &self.inner.source_text
    }

    #[getter]
    fn entry_symbol(&self) -> &str {
        &self.inner.entry_symbol
    }

    #[getter]
    fn conversion_count(&self) -> usize {
        self.inner.conversion_count
    }

    #[getter]
    fn file_name(&self) -> String {
        self.inner.file_name()
    }

    fn sha256(&self) -> String {
        self.inner.sha256()
    }

    /// Copies the unit into `out_dir/<target>/` for each target and returns
    /// the written paths.
    fn port(&self, targets: Vec<String>, out_dir: PathBuf) -> PyResult<Vec<PathBuf>> {
        let staged = emitter::port(&self.inner, &targets, &out_dir).map_err(err)?;
        Ok(staged.into_iter().map(|(_, p)| p).collect())
    }
}

/// An emitter that counts its conversions.
#[pyclass(name = "Transpiler", frozen)]
pub struct PyTranspiler {
    emitter: Emitter,
    registry: Registry,
}

#[pymethods]
impl PyTranspiler {
    #[new]
    #[pyo3(signature = (registry=None))]
    fn new(registry: Option<PathBuf>) -> PyResult<Self> {
        let registry = load_registry(registry)?;
        Ok(PyTranspiler {
            emitter: Emitter::new(EmitConfig::default(), registry.clone()),
            registry,
        })
    }

    fn transpile(&self, source: &str) -> PyResult<PyEmittedUnit> {
        let tp = compile(source, &self.registry).map_err(err)?;
        let inner = self.emitter.emit(&tp).map_err(err)?;
        Ok(PyEmittedUnit { inner })
    }

    #[getter]
    fn invocations(&self) -> usize {
        self.emitter.invocations()
    }
}

/// `(kind, lexeme, line, col)` for every token.
#[pyfunction]
fn tokenize(source: &str) -> PyResult<Vec<(String, String, usize, usize)>> {
    let tokens = frontend::tokenize(source).map_err(err)?;
    Ok(tokens
        .into_iter()
        .map(|t| (format!("{:?}", t.kind), t.lexeme, t.line, t.col))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (source, registry=None))]
fn transpile(source: &str, registry: Option<PathBuf>) -> PyResult<PyEmittedUnit> {
    PyTranspiler::new(registry)?.transpile(source)
}

/// Runs `entry` in the interpreter. Arguments are floats or lists of
/// floats; outputs come back the same way, keyed by name.
#[pyfunction]
#[pyo3(signature = (source, entry, args, registry=None))]
fn run<'py>(
    py: Python<'py>,
    source: &str,
    entry: &str,
    args: Vec<Bound<'py, PyAny>>,
    registry: Option<PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    let tp = compile(source, &load_registry(registry)?).map_err(err)?;
    let mut values = Vec::with_capacity(args.len());
    for a in &args {
        values.push(match a.extract::<f64>() {
            Ok(x) => NumValue::RScalar(x),
            Err(_) => NumValue::column(a.extract::<Vec<f64>>()?),
        });
    }
    let detector = PtConfig::default();
    let out = Interpreter::new(&tp, &detector)
        .call(entry, values)
        .map_err(err)?;
    let dict = PyDict::new(py);
    for (name, v) in out.outputs {
        if v.is_scalar() {
            dict.set_item(name, v.as_scalar())?;
        } else {
            dict.set_item(name, v.to_reals())?;
        }
    }
    Ok(dict)
}

/// `(samples, planted_r_peaks)` for a schedule like `"0-60:70,60-90:120"`.
#[pyfunction]
#[pyo3(signature = (schedule, fs, noise=0.0, seed=0))]
fn synth_ecg(schedule: &str, fs: u32, noise: f64, seed: u64) -> PyResult<(Vec<f64>, Vec<usize>)> {
    let sched = dsp::parse_schedule(schedule).map_err(err)?;
    let s = dsp::synth_ecg(&sched, fs, noise, seed).map_err(err)?;
    Ok((s.signal.samples, s.r_peaks))
}

/// 0-based R-peak sample indices.
#[pyfunction]
fn pan_tompkin(samples: Vec<f64>, fs: u32) -> PyResult<Vec<usize>> {
    let det = dsp::pan_tompkin(&signal(samples, fs)?, &PtConfig::default()).map_err(err)?;
    Ok(det.peak_indices)
}

/// `(t_sec, bpm)` lists from the chosen engine (`"native"` or `"interp"`).
#[pyfunction]
#[pyo3(signature = (samples, fs, engine="native"))]
fn heart_rate(samples: Vec<f64>, fs: u32, engine: &str) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let engine: Engine = engine.parse().map_err(PyValueError::new_err)?;
    let tp = compile(corpus::EKG_SOURCE, &Registry::builtin_defaults()).map_err(err)?;
    let hr = pipeline::heart_rate(engine, &tp, &signal(samples, fs)?, &PtConfig::default())
        .map_err(err)?;
    Ok((hr.thr, hr.ihr))
}

/// The `t_sec,bpm` CSV text for a signal.
#[pyfunction]
#[pyo3(signature = (samples, fs, engine="native"))]
fn heart_rate_csv(samples: Vec<f64>, fs: u32, engine: &str) -> PyResult<String> {
    let (thr, ihr) = heart_rate(samples, fs, engine)?;
    Ok(pipeline::render_hr_csv(&dsp::HeartRateSeries {
        ihr,
        thr,
        peaks: Vec::new(),
    }))
}

/// `(agrees, max_abs_ihr_diff, max_abs_thr_diff)` between the two engines.
#[pyfunction]
#[pyo3(signature = (samples, fs, source=None))]
fn diff_check(samples: Vec<f64>, fs: u32, source: Option<&str>) -> PyResult<(bool, f64, f64)> {
    let tp = compile(
        source.unwrap_or(corpus::EKG_SOURCE),
        &Registry::builtin_defaults(),
    )
    .map_err(err)?;
    let r =
        pipeline::diff_check(&tp, &signal(samples, fs)?, &PtConfig::default(), 0.0).map_err(err)?;
    Ok((r.agrees(), r.max_ihr, r.max_thr))
}

/// MATLAB-subset converter and ECG heart-rate tools.
#[pymodule]
mod retarget {
    #[pymodule_export]
    use super::{
        diff_check, heart_rate, heart_rate_csv, pan_tompkin, run, synth_ecg, tokenize, transpile,
        PyEmittedUnit, PyTranspiler,
    };

    #[pymodule_export]
    const EKG_SOURCE: &str = retarget_core::corpus::EKG_SOURCE;
}
