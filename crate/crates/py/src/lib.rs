//! Python bindings. Reports cross the boundary as JSON strings; matrices,
//! groups and coverings are wrapped as classes.

use std::collections::BTreeMap;

use bsll_core::count::{self, CountOptions};
use bsll_core::covering::{self, LoopCovering};
use bsll_core::pc::{self, GAGroup, MatrixA};
use bsll_core::{Error, Limits};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) | Error::Structural { .. } | Error::NonTermination { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn limits(max_order: Option<usize>) -> Limits {
    let mut l = Limits::default();
    if let Some(m) = max_order {
        l.max_order = m;
    }
    l
}

fn to_json(value: &impl serde::Serialize) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Lower-triangular commutator matrix over Z/p.
#[pyclass(name = "Matrix", frozen, skip_from_py_object, module = "bsll")]
#[derive(Clone)]
struct PyMatrix {
    inner: MatrixA,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(p: u32, k: usize, rows: Vec<Vec<u32>>) -> PyResult<Self> {
        MatrixA::new(p, k, rows)
            .map(|inner| PyMatrix { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn zero(p: u32, k: usize) -> PyResult<Self> {
        MatrixA::zero(p, k)
            .map(|inner| PyMatrix { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(|inner| PyMatrix { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<u32>> {
        self.inner.rows().to_vec()
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Matrix(p={}, k={}, rows={:?})",
            self.inner.p(),
            self.inner.k(),
            self.inner.rows()
        )
    }

    fn __eq__(&self, other: &PyMatrix) -> bool {
        self.inner == other.inner
    }
}

/// The group presented by a matrix, with its collected table.
#[pyclass(name = "Group", frozen, module = "bsll")]
struct PyGroup {
    inner: GAGroup,
}

impl PyGroup {
    fn table(&self) -> PyResult<&bsll_core::group::GroupTable> {
        self.inner
            .table()
            .map(|t| &**t)
            .ok_or_else(|| PyValueError::new_err("presentation is inconsistent"))
    }
}

#[pymethods]
impl PyGroup {
    #[getter]
    fn matrix(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.matrix().clone(),
        }
    }

    #[getter]
    fn is_consistent(&self) -> bool {
        self.inner.is_consistent()
    }

    /// `None` when the presentation is inconsistent.
    #[getter]
    fn order(&self) -> Option<usize> {
        self.inner.table().map(|t| t.order())
    }

    #[getter]
    fn generators(&self) -> Vec<usize> {
        self.inner.generators().to_vec()
    }

    fn corner_element(&self) -> usize {
        self.inner.corner_element()
    }

    fn mul(&self, a: usize, b: usize) -> PyResult<usize> {
        let t = self.table()?;
        if a >= t.order() || b >= t.order() {
            return Err(PyValueError::new_err("element id out of range"));
        }
        Ok(t.mul(a, b))
    }

    fn element_order(&self, x: usize) -> PyResult<usize> {
        let t = self.table()?;
        if x >= t.order() {
            return Err(PyValueError::new_err("element id out of range"));
        }
        Ok(t.element_order(x))
    }

    /// Normal-form exponents of an element.
    fn word_of(&self, x: usize) -> Vec<u32> {
        self.inner.word_of(x).0
    }

    /// Whether the loop carried by the shift is faithful.
    fn shift_is_faithful(&self) -> PyResult<bool> {
        let s = self.inner.shift_data().map_err(py_err)?;
        Ok(bsll_core::gog::is_faithful_loop(&s.table, &s.g1, &s.g2, &s.shift).faithful)
    }

    fn covering(&self, u: usize) -> PyResult<PyCovering> {
        LoopCovering::from_group(&self.inner, u)
            .map(|inner| PyCovering { inner })
            .map_err(py_err)
    }
}

/// A normalised covering of the loop base.
#[pyclass(name = "Covering", frozen, module = "bsll")]
struct PyCovering {
    inner: LoopCovering,
}

#[pymethods]
impl PyCovering {
    #[getter]
    fn u(&self) -> usize {
        self.inner.u()
    }

    /// Violation messages; empty when valid.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn is_valid(&self) -> bool {
        self.inner.is_valid()
    }

    fn sheets(&self) -> PyResult<u64> {
        self.inner.sheets().map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }
}

#[pyfunction]
#[pyo3(signature = (matrix, max_order=None))]
fn build_group(matrix: &PyMatrix, max_order: Option<usize>) -> PyResult<PyGroup> {
    pc::build_group(&matrix.inner, &limits(max_order))
        .map(|inner| PyGroup { inner })
        .map_err(py_err)
}

/// Group order by coset enumeration, independent of collection.
#[pyfunction]
fn order_oracle(matrix: &PyMatrix) -> PyResult<usize> {
    pc::order_oracle(&matrix.inner).map_err(py_err)
}

#[pyfunction]
fn enumerate_matrices(p: u32, k: usize) -> PyResult<Vec<PyMatrix>> {
    Ok(pc::enumerate_matrices(p, k)
        .map_err(py_err)?
        .map(|inner| PyMatrix { inner })
        .collect())
}

#[pyfunction]
fn iso_sufficient(a: &PyCovering, b: &PyCovering) -> bool {
    covering::iso_sufficient(&a.inner, &b.inner).is_some()
}

#[pyfunction]
fn iso_necessary(a: &PyCovering, b: &PyCovering) -> bool {
    covering::iso_necessary(&a.inner, &b.inner).is_some()
}

/// The count report for `n = p^k` as a JSON string.
#[pyfunction]
#[pyo3(signature = (p, k, jobs=0, max_order=None))]
fn count_overlattices(
    py: Python<'_>,
    p: u32,
    k: usize,
    jobs: usize,
    max_order: Option<usize>,
) -> PyResult<String> {
    let opts = CountOptions {
        jobs,
        limits: limits(max_order),
    };
    let report = py
        .detach(|| count::count_overlattices(p, k, &opts))
        .map_err(py_err)?;
    to_json(&report)
}

/// The lower-bound family report as a JSON string.
#[pyfunction]
#[pyo3(signature = (p, k, jobs=0))]
fn lower_bound_family(py: Python<'_>, p: u32, k: usize, jobs: usize) -> PyResult<String> {
    let opts = CountOptions {
        jobs,
        ..CountOptions::default()
    };
    let report = py
        .detach(|| count::lower_bound_family(p, k, &opts))
        .map_err(py_err)?;
    to_json(&report)
}

/// Degree histogram of the interior of the loop base's universal-cover ball.
#[pyfunction]
fn ball_profile(p: u32, radius: usize) -> PyResult<BTreeMap<usize, usize>> {
    let base = covering::make_loop_base(p)
        .map_err(py_err)?
        .edge_indexed()
        .map_err(py_err)?;
    let ball = bsll_core::tree::universal_ball(
        &base,
        0,
        radius,
        bsll_core::tree::DEFAULT_MAX_BALL_VERTICES,
    )
    .map_err(py_err)?;
    Ok(ball.degree_profile())
}

#[pymodule]
fn bsll(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", count::TOOL_VERSION)?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyGroup>()?;
    m.add_class::<PyCovering>()?;
    m.add_function(wrap_pyfunction!(build_group, m)?)?;
    m.add_function(wrap_pyfunction!(order_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_matrices, m)?)?;
    m.add_function(wrap_pyfunction!(iso_sufficient, m)?)?;
    m.add_function(wrap_pyfunction!(iso_necessary, m)?)?;
    m.add_function(wrap_pyfunction!(count_overlattices, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_family, m)?)?;
    m.add_function(wrap_pyfunction!(ball_profile, m)?)?;
    Ok(())
}
