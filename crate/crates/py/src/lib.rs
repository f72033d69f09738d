//! Python bindings. Entry points take configuration text or JSON and return
//! the same JSON reports the CLI emits.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dualinv::finite::{build_group, verify_class_inversion};
use dualinv::harness::{self, emit_json, parse_config_text, Counterexample, GroupSpec, SuiteConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Runs the suites described by `key = value` configuration text and
/// returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (config = ""))]
fn run_suite(config: &str) -> PyResult<String> {
    let settings = parse_config_text(config).map_err(err)?;
    let mut cfg = SuiteConfig::default();
    cfg.apply(&settings).map_err(err)?;
    let report = harness::run_suite(&cfg).map_err(err)?;
    Ok(emit_json(&report))
}

/// Class-inversion report for a finite group given as `family:n:p`, e.g. `"sp:2:3"`.
#[pyfunction]
fn finite_dual(group: &str) -> PyResult<String> {
    let spec: GroupSpec = group.parse().map_err(err)?;
    let table = build_group(spec.family, spec.dim, spec.p).map_err(err)?;
    Ok(emit_json(&verify_class_inversion(&table)))
}

/// Re-runs one counterexample payload (JSON) and returns the replay report.
#[pyfunction]
fn replay(payload: &str) -> PyResult<String> {
    let cx: Counterexample = serde_json::from_str(payload).map_err(err)?;
    let report = harness::replay(&cx).map_err(err)?;
    Ok(emit_json(&report))
}

#[pymodule]
fn dualinv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA_VERSION", harness::SCHEMA_VERSION)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(finite_dual, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    Ok(())
}
