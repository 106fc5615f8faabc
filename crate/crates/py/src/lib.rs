//! Python bindings: partitions, graph-of-matrices instances, sharp exponents,
//! graph sums by both routes, and witness verification.
//!
//! The JSON documents accepted and produced here are exactly the ones the
//! `graphsum` CLI reads and writes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use graphsum::decomposition::{cutting_edges, forest_of};
use graphsum::evaluation::{bound, graph_sum_bruteforce};
use graphsum::modification::to_input_output;
use graphsum::operator::{graph_sum_via_operator, operator_norm_check};
use graphsum::partition;
use graphsum::schema::GraphDoc;
use graphsum::witness;
use graphsum::{GraphOfMatrices, IOGraph};

fn to_py_err(e: graphsum::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A set partition of {1,…,k} in canonical form.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Partition {
    inner: partition::Partition,
}

#[pymethods]
impl Partition {
    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        self.inner.blocks().to_vec()
    }

    fn block_count(&self) -> usize {
        self.inner.block_count()
    }

    /// True iff self >= other in the refinement order.
    fn dominates(&self, other: &Partition) -> PyResult<bool> {
        self.inner.dominates(&other.inner).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("Partition(\"{}\")", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __eq__(&self, other: &Partition) -> bool {
        self.inner == other.inner
    }
}

/// Parse a partition from brace syntax (`{1,2,4}{3}`) or a JSON array of
/// integer arrays.
#[pyfunction]
fn parse_partition(text: &str) -> PyResult<Partition> {
    partition::Partition::parse(text)
        .map(|inner| Partition { inner })
        .map_err(to_py_err)
}

/// The kernel of a multi-index: positions carrying equal values share a block.
#[pyfunction]
fn kernel_of(indices: Vec<u64>) -> PyResult<Partition> {
    partition::Partition::kernel_of(&indices)
        .map(|inner| Partition { inner })
        .map_err(to_py_err)
}

/// Witness verification outcome.
#[pyclass(frozen)]
struct OptimalityReport {
    #[pyo3(get)]
    sum: f64,
    #[pyo3(get)]
    target: f64,
    #[pyo3(get)]
    exponent: (i64, i64),
    #[pyo3(get)]
    max_norm_deviation: f64,
    #[pyo3(get)]
    passed: bool,
}

#[pymethods]
impl OptimalityReport {
    fn __repr__(&self) -> String {
        format!(
            "OptimalityReport(sum={}, target={}, passed={})",
            self.sum, self.target, self.passed
        )
    }
}

/// A graph of matrices resolved from a JSON document.
#[pyclass]
struct Instance {
    gom: GraphOfMatrices,
    io: Option<IOGraph>,
}

impl Instance {
    fn require_io(&mut self) -> PyResult<&IOGraph> {
        if self.io.is_none() {
            self.io = Some(to_input_output(&self.gom).map_err(to_py_err)?);
        }
        Ok(self.io.as_ref().expect("just set"))
    }
}

#[pymethods]
impl Instance {
    /// Resolve a JSON document; `n` supplies dimensions for vertices without
    /// a `dim`, `seed` feeds `random` matrix specs without their own seed.
    #[staticmethod]
    #[pyo3(signature = (text, n=None, seed=0))]
    fn from_json(text: &str, n: Option<usize>, seed: u64) -> PyResult<Self> {
        let doc = GraphDoc::parse(text).map_err(to_py_err)?;
        let gom = doc.resolve(n, seed).map_err(to_py_err)?;
        gom.require_valid().map_err(to_py_err)?;
        Ok(Instance { gom, io: None })
    }

    /// The constraint graph of a partition with identity matrices attached.
    #[staticmethod]
    fn from_partition(pi: &Partition, n: usize) -> PyResult<Self> {
        let graph = partition::graph_of_partition(&pi.inner).map_err(to_py_err)?;
        let gom = GraphOfMatrices::uniform(graph, n, |_| graphsum::Matrix::identity(n));
        Ok(Instance { gom, io: None })
    }

    fn to_json(&self) -> String {
        GraphDoc::from_gom(&self.gom).to_json()
    }

    /// The sharp exponent as (numerator, denominator).
    fn exponent(&self) -> (i64, i64) {
        let r = graphsum::decomposition::exponent(&self.gom.graph);
        (r.numerator(), r.denominator())
    }

    fn exponent_value(&self) -> f64 {
        graphsum::decomposition::exponent(&self.gom.graph).to_f64()
    }

    fn cutting_edges(&self) -> Vec<String> {
        cutting_edges(&self.gom.graph)
            .into_iter()
            .map(|e| e.to_string())
            .collect()
    }

    /// Two-edge connected components as lists of vertex ids.
    fn components(&self) -> Vec<Vec<String>> {
        forest_of(&self.gom.graph)
            .nodes
            .iter()
            .map(|node| node.iter().map(|v| v.to_string()).collect())
            .collect()
    }

    /// Brute-force graph sum.
    fn sum_brute(&self) -> PyResult<f64> {
        graph_sum_bruteforce(&self.gom).map_err(to_py_err)
    }

    /// Graph sum through the input-output rewrite and operator factorization.
    fn sum_operator(&mut self) -> PyResult<f64> {
        let io = self.require_io()?;
        graph_sum_via_operator(io).map_err(to_py_err)
    }

    /// (operator norm of T_G, product of edge-matrix norms).
    fn operator_norms(&mut self) -> PyResult<(f64, f64)> {
        let io = self.require_io()?;
        operator_norm_check(io).map_err(to_py_err)
    }

    /// The sharp bound on |S|.
    fn bound(&self) -> PyResult<f64> {
        bound(&self.gom).map_err(to_py_err)
    }

    fn norm_product(&self) -> f64 {
        self.gom.norm_product()
    }

    /// Rewrite into input-output form; returns the rewritten document with
    /// `inputs`, `outputs`, and `provenance`.
    fn modify_json(&mut self) -> PyResult<String> {
        let io = self.require_io()?;
        Ok(GraphDoc::from_io(io).to_json())
    }

    fn inputs(&mut self) -> PyResult<Vec<String>> {
        let io = self.require_io()?;
        Ok(io.inputs.iter().map(|v| v.to_string()).collect())
    }

    fn outputs(&mut self) -> PyResult<Vec<String>> {
        let io = self.require_io()?;
        Ok(io.outputs.iter().map(|v| v.to_string()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(vertices={}, edges={})",
            self.gom.graph.vertex_count(),
            self.gom.graph.edge_count()
        )
    }
}

/// Attach the norm-one witness matrices to a graph document and return the
/// full instance as JSON.
#[pyfunction]
fn witness_json(graph_json: &str, n: usize) -> PyResult<String> {
    let doc = GraphDoc::parse(graph_json).map_err(to_py_err)?;
    let graph = doc.to_graph().map_err(to_py_err)?;
    let gom = witness::witness_matrices(&graph, n).map_err(to_py_err)?;
    Ok(GraphDoc::from_gom(&gom).to_json())
}

/// Build the witness for a graph document and check it attains N^r(G).
#[pyfunction]
fn verify_optimality(graph_json: &str, n: usize) -> PyResult<OptimalityReport> {
    let doc = GraphDoc::parse(graph_json).map_err(to_py_err)?;
    let graph = doc.to_graph().map_err(to_py_err)?;
    let report = witness::verify_optimality(&graph, n).map_err(to_py_err)?;
    Ok(OptimalityReport {
        sum: report.sum,
        target: report.target,
        exponent: (report.exponent.numerator(), report.exponent.denominator()),
        max_norm_deviation: report.max_norm_deviation,
        passed: report.pass,
    })
}

#[pymodule]
fn graphsum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Partition>()?;
    m.add_class::<Instance>()?;
    m.add_class::<OptimalityReport>()?;
    m.add_function(wrap_pyfunction!(parse_partition, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_of, m)?)?;
    m.add_function(wrap_pyfunction!(witness_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify_optimality, m)?)?;
    Ok(())
}
