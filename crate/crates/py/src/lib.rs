//! Python bindings: each CLI command as a function returning `(exit_code, report_json)`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sqzlift_cli::{Failure, Outcome, Params};
use sqzlift_core::exactlin::{AbGroup, Int};

fn params(
    resolution_length: Option<usize>,
    budget: Option<usize>,
    section: Option<u64>,
    max_degree: usize,
) -> Params {
    Params { resolution_length, budget, section, max_degree }
}

fn finish(command: &str, result: Result<Outcome, Failure>) -> (u8, String) {
    let (code, value) = match result {
        Ok(o) => (if o.ok { 0 } else { 2 }, o.report),
        Err(f) => (f.exit_code(), f.diagnostic(Some(command))),
    };
    (code, serde_json::to_string(&value).expect("reports are plain JSON"))
}

/// Runs a command on TOML instance text.
#[pyfunction]
#[pyo3(signature = (command, instance, resolution_length=None, budget=None, section=None, max_degree=2))]
fn run(
    py: Python<'_>,
    command: &str,
    instance: &str,
    resolution_length: Option<usize>,
    budget: Option<usize>,
    section: Option<u64>,
    max_degree: usize,
) -> (u8, String) {
    let p = params(resolution_length, budget, section, max_degree);
    py.detach(|| finish(command, sqzlift_cli::run_toml(command, instance, &p)))
}

/// Runs a command on an instance file.
#[pyfunction]
#[pyo3(signature = (command, path, resolution_length=None, budget=None, section=None, max_degree=2))]
fn run_file(
    py: Python<'_>,
    command: &str,
    path: std::path::PathBuf,
    resolution_length: Option<usize>,
    budget: Option<usize>,
    section: Option<u64>,
    max_degree: usize,
) -> (u8, String) {
    let p = params(resolution_length, budget, section, max_degree);
    py.detach(|| finish(command, sqzlift_cli::run(command, &path, &p)))
}

/// Normal form of ⊕ Z/mᵢ (a modulus of 0 is a copy of Z), as a display string.
#[pyfunction]
fn abelian_group(moduli: Vec<i64>) -> PyResult<String> {
    if moduli.iter().any(|&m| m < 0) {
        return Err(PyValueError::new_err("moduli must be non-negative"));
    }
    let moduli: Vec<Int> = moduli.into_iter().map(Int::from).collect();
    Ok(AbGroup::from_moduli(&moduli).to_string())
}

#[pymodule]
fn sqzlift(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("COMMANDS", sqzlift_cli::COMMANDS.to_vec())?;
    m.add("SCHEMA_VERSION", sqzlift_cli::SCHEMA_VERSION)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_file, m)?)?;
    m.add_function(wrap_pyfunction!(abelian_group, m)?)?;
    Ok(())
}
