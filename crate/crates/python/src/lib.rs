// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Python bindings. Matrices cross the boundary as nested lists of `complex`
//! (row-major); structured results (reports, witnesses, trajectories) come
//! back as plain dicts.

use std::sync::Arc;

use dissipator_lab::dissipator::{
    self, dissipator_matrix, dissipator_spectrum, kernel_basis, DEFAULT_KERNEL_TOL,
};
use dissipator_lab::evolution::{self, IntegratorConfig, Method};
use dissipator_lab::fock::{LadderOps, Spin, SystemOperator};
use dissipator_lab::hamiltonian::{build_hamiltonian, liouvillian_apply};
use dissipator_lab::hs::{self, standard_hermitian_basis};
use dissipator_lab::verification::{self, SampleCounts};
use dissipator_lab::{
    DissipatorKind, HermitianPoint, LabError, LiouvillianSpec, PhysicalParams, PumpingProfile, TruncationConfig,
};
use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type C64 = num_complex::Complex64;
type Rows = Vec<Vec<C64>>;

fn to_py(err: LabError) -> PyErr {
    match err {
        LabError::Numerical(_) | LabError::Instability { .. } => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn matrix_from_rows(rows: &Rows) -> Result<DMatrix<C64>, LabError> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(LabError::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn hermitian_from_rows(rows: &Rows) -> Result<HermitianPoint, LabError> {
    HermitianPoint::new(matrix_from_rows(rows)?)
}

fn rows_from_matrix(m: &DMatrix<C64>) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn truncation(n_levels: usize) -> PyResult<TruncationConfig> {
    TruncationConfig::new(n_levels).map_err(to_py)
}

fn kind(name: &str) -> PyResult<DissipatorKind> {
    name.parse().map_err(to_py)
}

/// Serializes through JSON so dicts mirror the CLI output exactly.
fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| to_py(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// `D ρ` (kind `"full"`) or `Δ ρ` (kind `"delta"`).
#[pyfunction]
#[pyo3(signature = (n_levels, rho, kind = "full"))]
fn apply_dissipator(n_levels: usize, rho: Rows, kind: &str) -> PyResult<Rows> {
    let ops = LadderOps::new(truncation(n_levels)?);
    let rho = hermitian_from_rows(&rho).map_err(to_py)?;
    let out = dissipator::apply_dissipator(self::kind(kind)?, &rho, &ops).map_err(to_py)?;
    Ok(rows_from_matrix(out.matrix()))
}

/// `⟨ρ, Lρ⟩` for the selected dissipator.
#[pyfunction]
#[pyo3(signature = (n_levels, rho, kind = "full"))]
fn quadratic_form(n_levels: usize, rho: Rows, kind: &str) -> PyResult<f64> {
    let ops = LadderOps::new(truncation(n_levels)?);
    let rho = hermitian_from_rows(&rho).map_err(to_py)?;
    dissipator::quadratic_form(self::kind(kind)?, &rho, &ops).map_err(to_py)
}

/// Real Hilbert-Schmidt inner product `tr(ρ₁ρ₂)` of Hermitian matrices.
#[pyfunction]
fn hs_inner(rho1: Rows, rho2: Rows) -> PyResult<f64> {
    let a = hermitian_from_rows(&rho1).map_err(to_py)?;
    let b = hermitian_from_rows(&rho2).map_err(to_py)?;
    hs::hs_inner(&a, &b).map_err(to_py)
}

/// `|n, s⟩⟨n, s|` with `spin` `"+"` or `"-"`.
#[pyfunction]
#[pyo3(signature = (n_levels, level, spin = "+"))]
fn fock_projector(n_levels: usize, level: usize, spin: &str) -> PyResult<Rows> {
    let spin = match spin {
        "+" => Spin::Up,
        "-" => Spin::Down,
        other => return Err(PyValueError::new_err(format!("spin must be '+' or '-', got {other:?}"))),
    };
    let p = SystemOperator::projector(truncation(n_levels)?, level, spin).map_err(to_py)?;
    Ok(rows_from_matrix(p.entries()))
}

/// Eigenvalues (ascending by real part) and spectral summary.
#[pyfunction]
#[pyo3(signature = (n_levels, kind = "full"))]
fn spectrum<'py>(py: Python<'py>, n_levels: usize, kind: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = truncation(n_levels)?;
    let basis = Arc::new(standard_hermitian_basis(cfg.system_dim()).map_err(to_py)?);
    let s = dissipator_spectrum(self::kind(kind)?, &LadderOps::new(cfg), &basis).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("eigenvalues", s.eigenvalues.clone())?;
    d.set_item("zero_count", s.zero_count)?;
    d.set_item("spectral_gap", s.spectral_gap)?;
    d.set_item("max_real_part", s.max_real_part)?;
    d.set_item("transpose_residual", s.transpose_residual)?;
    Ok(d)
}

/// Dimension of the numerical kernel of the superoperator matrix.
#[pyfunction]
#[pyo3(signature = (n_levels, kind = "full", tol = DEFAULT_KERNEL_TOL))]
fn kernel_dimension(n_levels: usize, kind: &str, tol: f64) -> PyResult<usize> {
    let cfg = truncation(n_levels)?;
    let basis = Arc::new(standard_hermitian_basis(cfg.system_dim()).map_err(to_py)?);
    let m = dissipator_matrix(self::kind(kind)?, &LadderOps::new(cfg), &basis).map_err(to_py)?;
    Ok(kernel_basis(&m, tol).map_err(to_py)?.len())
}

/// The Δ counterexample values with their intermediate matrices.
#[pyfunction]
fn delta_witnesses(py: Python<'_>, n_levels: usize) -> PyResult<Bound<'_, PyAny>> {
    let v = verification::delta_witness_values(truncation(n_levels)?).map_err(to_py)?;
    to_dict(py, &v)
}

/// Full certification; same schema as `dissipator-lab verify`.
#[pyfunction]
#[pyo3(signature = (n_levels = vec![2, 4, 8, 16], seed = 0, samples = None))]
fn verify(py: Python<'_>, n_levels: Vec<usize>, seed: u64, samples: Option<usize>) -> PyResult<Bound<'_, PyAny>> {
    let counts = match samples {
        Some(n) => SampleCounts {
            symmetry: n,
            nonpositivity: n,
            closed_form: n,
            trace: n,
        },
        None => SampleCounts::default(),
    };
    let summary = py
        .detach(|| verification::run_full_certification(&n_levels, seed, counts))
        .map_err(to_py)?;
    to_dict(py, &summary)
}

/// Truncated damped, driven Jaynes-Cummings generator.
#[pyclass(name = "Liouvillian", frozen)]
struct PyLiouvillian {
    spec: LiouvillianSpec,
}

#[pymethods]
impl PyLiouvillian {
    /// `allow_degenerate` admits zero frequencies and zero damping.
    #[new]
    #[pyo3(signature = (
        n_levels, omega_c = 1.0, omega_a = 1.0, p = 0.0, gamma = 1.0, pumping = "none",
        drive_amp = 0.0, drive_freq = 0.0, dissipator = "full", allow_degenerate = false
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n_levels: usize,
        omega_c: f64,
        omega_a: f64,
        p: f64,
        gamma: f64,
        pumping: &str,
        drive_amp: f64,
        drive_freq: f64,
        dissipator: &str,
        allow_degenerate: bool,
    ) -> PyResult<Self> {
        let params = if allow_degenerate {
            PhysicalParams::degenerate(omega_c, omega_a, p, gamma)
        } else {
            PhysicalParams::new(omega_c, omega_a, p, gamma)
        }
        .map_err(to_py)?;
        let pumping = PumpingProfile::from_name(pumping, drive_amp, drive_freq).map_err(to_py)?;
        Ok(Self {
            spec: LiouvillianSpec::new(params, pumping, kind(dissipator)?, truncation(n_levels)?),
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn hamiltonian(&self, t: f64) -> PyResult<Rows> {
        Ok(rows_from_matrix(build_hamiltonian(&self.spec, t).map_err(to_py)?.entries()))
    }

    /// `𝒜(t) ρ`.
    fn apply(&self, t: f64, rho: Rows) -> PyResult<Rows> {
        let rho = hermitian_from_rows(&rho).map_err(to_py)?;
        Ok(rows_from_matrix(liouvillian_apply(&self.spec, t, &rho).map_err(to_py)?.matrix()))
    }

    /// Integrates from `rho0`; returns times, observables and the final state.
    #[pyo3(signature = (rho0, t_end, step = 1e-3, t_start = 0.0, record_every = 1, method = "rk4"))]
    #[allow(clippy::too_many_arguments)]
    fn evolve<'py>(
        &self,
        py: Python<'py>,
        rho0: Rows,
        t_end: f64,
        step: f64,
        t_start: f64,
        record_every: usize,
        method: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let rho0 = hermitian_from_rows(&rho0).map_err(to_py)?;
        let method = match method {
            "rk4" => Method::Rk4 { step },
            "expm" => Method::Expm { step },
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        };
        let cfg = IntegratorConfig {
            method,
            t_start,
            t_end,
            record_every,
        };
        let traj = py.detach(|| evolution::evolve(&self.spec, &rho0, &cfg)).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("times", traj.times.clone())?;
        d.set_item("observables", to_dict(py, &traj.observables)?)?;
        d.set_item("max_hermiticity_residual", traj.max_hermiticity_residual())?;
        d.set_item("final_state", rows_from_matrix(traj.last_state().matrix()))?;
        Ok(d)
    }
}

#[pymodule]
fn dissipator_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(apply_dissipator, m)?)?;
    m.add_function(wrap_pyfunction!(quadratic_form, m)?)?;
    m.add_function(wrap_pyfunction!(hs_inner, m)?)?;
    m.add_function(wrap_pyfunction!(fock_projector, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(delta_witnesses, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_class::<PyLiouvillian>()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            vec![C64::new(1.0, 0.0), C64::new(0.5, -0.25)],
            vec![C64::new(0.5, 0.25), C64::new(-2.0, 0.0)],
        ];
        let h = hermitian_from_rows(&rows).unwrap();
        assert_eq!(rows_from_matrix(h.matrix()), rows);
    }

    #[test]
    fn ragged_and_non_hermitian_rows_rejected() {
        let ragged = vec![vec![C64::new(1.0, 0.0)], vec![]];
        assert!(matches!(matrix_from_rows(&ragged), Err(LabError::DimensionMismatch { .. })));
        let skew = vec![
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
        ];
        assert!(hermitian_from_rows(&skew).is_err());
    }
}
