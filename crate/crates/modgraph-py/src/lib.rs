#![allow(clippy::type_complexity)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use modgraph::complexes::{self, ComplexSpec, Family, GradedComplex};
use modgraph::frobenius::{self, FrobeniusData};
use modgraph::{amplitude, cli, linalg, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(m) => PyValueError::new_err(m),
        Error::Internal(m) => PyRuntimeError::new_err(m),
    }
}

/// Differential graded Frobenius algebra with a contracting homotopy.
#[pyclass(name = "Algebra", module = "modgraph_py", frozen)]
struct PyAlgebra {
    inner: FrobeniusData,
}

#[pymethods]
impl PyAlgebra {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        FrobeniusData::from_text(text).map(|inner| PyAlgebra { inner }).map_err(to_py)
    }

    /// `span{1, a}` with `a*a = c`.
    #[staticmethod]
    fn two_dim(c: i64) -> Self {
        PyAlgebra { inner: frobenius::two_dim(c) }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn form_degree(&self) -> u8 {
        self.inner.form_degree
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// `[(check, passed, witness)]`
    fn validate(&self) -> Vec<(String, bool, Option<String>)> {
        frobenius::validate(&self.inner).checks.into_iter().map(|c| (c.name.to_string(), c.passed, c.witness)).collect()
    }

    /// Full text report including the three relations.
    fn report(&self) -> PyResult<String> {
        cli::algebra_report(&self.inner).map_err(to_py)
    }

    /// `(holds, witness)` of relation 1, 2 or 3; witness coordinates are
    /// rational numbers as strings.
    fn relation(&self, which: u8) -> PyResult<(bool, Option<(String, Vec<String>)>)> {
        let r = match which {
            1 => frobenius::check_rel1(&self.inner),
            2 => frobenius::check_rel2(&self.inner),
            3 => frobenius::check_rel3(&self.inner),
            _ => return Err(PyValueError::new_err("relation must be 1, 2 or 3")),
        }
        .map_err(to_py)?;
        Ok((r.holds, r.witness.map(|(x, v)| (x, v.iter().map(ToString::to_string).collect()))))
    }

    fn __repr__(&self) -> String {
        format!("Algebra(dim={}, form_degree={})", self.inner.dim(), self.inner.form_degree)
    }
}

/// Graded graph complex.
#[pyclass(name = "Complex", module = "modgraph_py", frozen)]
struct PyComplex {
    inner: GradedComplex,
}

#[pymethods]
impl PyComplex {
    #[new]
    #[pyo3(signature = (family, twist=0, genus=None, gamma=None, nu=None, legs=None, cutoff=None))]
    fn new(
        family: &str,
        twist: u8,
        genus: Option<u32>,
        gamma: Option<u32>,
        nu: Option<u32>,
        legs: Option<usize>,
        cutoff: Option<usize>,
    ) -> PyResult<Self> {
        let fam = Family::parse(family).map_err(to_py)?;
        let spec: ComplexSpec = cli::spec_from_flags(fam, twist, genus, gamma, nu, legs, cutoff).map_err(to_py)?;
        complexes::build_complex(&spec).map(|inner| PyComplex { inner }).map_err(to_py)
    }

    #[getter]
    fn complete(&self) -> bool {
        self.inner.complete
    }

    fn dims(&self) -> Vec<usize> {
        self.inner.dims()
    }

    /// Canonical serializations of the basis in `degree`.
    fn basis(&self, degree: usize) -> PyResult<Vec<String>> {
        let b = self.inner.bases.get(degree).ok_or_else(|| PyValueError::new_err("degree out of range"))?;
        Ok(b.iter().map(|g| g.to_text()).collect())
    }

    /// `(rows, cols, [(row, col, value)])` of the differential out of `degree`.
    fn differential(&self, degree: usize) -> PyResult<(usize, usize, Vec<(usize, usize, i64)>)> {
        let m = self.inner.diffs.get(degree).ok_or_else(|| PyValueError::new_err("degree out of range"))?;
        Ok((m.rows(), m.cols(), m.entries().to_vec()))
    }

    fn d_squared_zero(&self) -> bool {
        complexes::check_d_squared(&self.inner).is_ok()
    }

    fn ranks(&self) -> Vec<usize> {
        linalg::ranks(&self.inner.chain_data())
    }

    fn betti(&self) -> Vec<usize> {
        linalg::betti(&self.inner.chain_data()).betti
    }

    fn hat_betti(&self) -> Vec<usize> {
        linalg::hat_betti(&self.betti())
    }

    fn euler(&self) -> i64 {
        linalg::euler_characteristic(&self.inner.dims())
    }

    /// Amplitude of every basis graph, as rational strings per degree.
    fn amplitudes(&self, algebra: &PyAlgebra) -> PyResult<Vec<Vec<String>>> {
        let z = amplitude::partition_cochain(&algebra.inner, &self.inner).map_err(to_py)?;
        Ok(z.values.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect())
    }

    /// `(holds, [(degree, index, value, graph)])`
    fn verify_cocycle(&self, algebra: &PyAlgebra) -> PyResult<(bool, Vec<(usize, usize, String, String)>)> {
        let (ok, obs) = amplitude::verify_cocycle(&algebra.inner, &self.inner).map_err(to_py)?;
        Ok((ok, obs.into_iter().map(|o| (o.degree, o.index, o.value.to_string(), o.graph)).collect()))
    }

    fn __repr__(&self) -> String {
        format!("Complex({}, dims={:?})", self.inner.spec, self.inner.dims())
    }
}

/// `Z(dG)` of the three-vertex reference graph in a ribbon complex with
/// `gamma = 1, nu = 2`.
#[pyfunction]
#[pyo3(signature = (algebra, family="ass-underline", cutoff=5))]
fn golden_boundary(algebra: &PyAlgebra, family: &str, cutoff: usize) -> PyResult<String> {
    let fam = Family::parse(family).map_err(to_py)?;
    let spec = cli::spec_from_flags(fam, algebra.inner.form_degree, None, Some(1), Some(2), None, Some(cutoff)).map_err(to_py)?;
    let c = complexes::build_complex(&spec).map_err(to_py)?;
    amplitude::boundary_amplitude(&algebra.inner, &c, &amplitude::golden_graph()).map(|v| v.to_string()).map_err(to_py)
}

/// Exact rank of an integer matrix given as triplets.
#[pyfunction]
fn rank_exact(rows: usize, cols: usize, entries: Vec<(usize, usize, i64)>) -> PyResult<usize> {
    let m = linalg::SparseIntMatrix::from_triplets(rows, cols, entries).map_err(to_py)?;
    Ok(linalg::rank_exact(&m))
}

/// Runs the command-line front end; returns the exit status.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    cli::main_with_args(std::iter::once("modgraph".to_string()).chain(args))
}

#[pymodule]
fn modgraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyComplex>()?;
    m.add_function(wrap_pyfunction!(golden_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(rank_exact, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
