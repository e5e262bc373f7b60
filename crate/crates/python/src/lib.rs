//! Python bindings. Vertex ids are the internal ids `0..n`; `Graph.labels()`
//! maps them back to the labels of the input.

use std::time::Duration;

use gccm_core::exact::Status;
use gccm_core::generators::{gen_counterexample as gen_flowers, gen_random_connected as gen_gnp};
use gccm_core::graph::{self, VertexSet};
use gccm_core::heuristics;
use gccm_core::ilp::{solve_iteratively, BackendChoice, Mode, SolveConfig};
use gccm_core::io::{load_graph, Format};
use gccm_core::reductions::{self, ReductionResult};
use gccm_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) | Error::Backend(_) | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Optimal => "optimal",
        Status::Timeout => "timeout",
        Status::Infeasible => "infeasible",
    }
}

/// Undirected, connected, simple graph.
#[pyclass(name = "Graph", module = "gccm", frozen)]
struct PyGraph {
    inner: graph::Graph,
}

#[pymethods]
impl PyGraph {
    /// Builds a graph from labeled edges. Labels are renumbered `0..n` in
    /// order of first appearance.
    #[new]
    fn new(edges: Vec<(u64, u64)>) -> PyResult<Self> {
        let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
        Self::parse(&text, "edgelist")
    }

    /// Parses edge-list or METIS text.
    #[staticmethod]
    #[pyo3(signature = (text, format = "edgelist"))]
    fn parse(text: &str, format: &str) -> PyResult<Self> {
        let format: Format = format.parse().map_err(PyValueError::new_err)?;
        Ok(PyGraph {
            inner: load_graph(text, format).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (path, format = "edgelist"))]
    fn load(path: &str, format: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| err(e.into()))?;
        Self::parse(&text, format)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn labels(&self) -> Vec<u64> {
        self.inner.labels().to_vec()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(err(Error::VertexOutOfRange { vertex: v, n: self.inner.n() }));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    /// Per-vertex eccentricities and the diameter.
    fn eccentricities(&self) -> (Vec<u32>, u32) {
        graph::eccentricities(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

fn set_of(g: &graph::Graph, members: Vec<usize>) -> PyResult<VertexSet> {
    if let Some(&v) = members.iter().find(|&&v| v >= g.n()) {
        return Err(err(Error::VertexOutOfRange { vertex: v, n: g.n() }));
    }
    Ok(VertexSet::new(members))
}

#[pyfunction]
fn farness(g: &PyGraph, s: Vec<usize>) -> PyResult<u64> {
    graph::group_farness(&g.inner, &set_of(&g.inner, s)?).map_err(err)
}

/// Group closeness `(n - |S|) / f(S)` as a `fractions.Fraction`.
#[pyfunction]
fn closeness<'py>(py: Python<'py>, g: &PyGraph, s: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    let c = graph::group_closeness(&g.inner, &set_of(&g.inner, s)?).map_err(err)?;
    py.import("fractions")?.getattr("Fraction")?.call1((*c.numer(), *c.denom()))
}

#[pyfunction]
fn distances_to_set(g: &PyGraph, s: Vec<usize>) -> PyResult<Vec<u32>> {
    graph::dist_to_set(&g.inner, &set_of(&g.inner, s)?).map_err(err)
}

fn reduction_dict<'py>(py: Python<'py>, r: &ReductionResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("dominated", r.dominated.as_slice().to_vec())?;
    d.set_item("absorbed", r.absorbed.as_slice().to_vec())?;
    d.set_item("alpha", r.alpha.clone())?;
    d.set_item("rho", r.rho.clone())?;
    Ok(d)
}

/// Dominated and absorbed vertices for `k` centers.
#[pyfunction]
fn reduce<'py>(py: Python<'py>, g: &PyGraph, k: usize) -> PyResult<Bound<'py, PyDict>> {
    reduction_dict(py, &reductions::reduce(&g.inner, k))
}

/// Lazy greedy; returns `(set, farness)`.
#[pyfunction]
fn greedy(g: &PyGraph, k: usize) -> PyResult<(Vec<usize>, u64)> {
    let s = heuristics::greedy(&g.inner, k).map_err(err)?;
    Ok((s.set.into_vec(), s.farness))
}

/// Greedy plus swap local search, restricted to non-dominated vertices
/// unless `use_dominated` is false.
#[pyfunction]
#[pyo3(signature = (g, k, use_dominated = true))]
fn approx(g: &PyGraph, k: usize, use_dominated: bool) -> PyResult<(Vec<usize>, u64)> {
    let red = if use_dominated {
        reductions::reduce(&g.inner, k)
    } else {
        ReductionResult::none(g.inner.n())
    };
    let s = heuristics::approx_pipeline(&g.inner, k, &red).map_err(err)?;
    Ok((s.set.into_vec(), s.farness))
}

#[pyfunction]
#[pyo3(signature = (g, k, initial, search_space = None))]
fn local_search(g: &PyGraph, k: usize, initial: Vec<usize>, search_space: Option<Vec<usize>>) -> PyResult<(Vec<usize>, u64)> {
    let space = match search_space {
        Some(s) => set_of(&g.inner, s)?,
        None => VertexSet::full(g.inner.n()),
    };
    let s = heuristics::local_search_swap(&g.inner, k, &set_of(&g.inner, initial)?, &space).map_err(err)?;
    Ok((s.set.into_vec(), s.farness))
}

/// Exhaustive search over all `k`-subsets; returns `(set, farness)`.
#[pyfunction]
fn brute_force(g: &PyGraph, k: usize) -> PyResult<(Vec<usize>, u64)> {
    let (s, f) = gccm_core::exact::brute_force(&g.inner, k, &VertexSet::full(g.inner.n())).map_err(err)?;
    Ok((s.into_vec(), f))
}

fn limit(seconds: Option<f64>) -> PyResult<Option<Duration>> {
    seconds
        .map(|s| Duration::try_from_secs_f64(s).map_err(|e| PyValueError::new_err(e.to_string())))
        .transpose()
}

/// Set-enumeration branch-and-bound. Returns a dict with `set`, `farness`,
/// `status` and `nodes`.
#[pyfunction]
#[pyo3(signature = (g, k, time_limit = None))]
fn branch_and_bound<'py>(py: Python<'py>, g: &PyGraph, k: usize, time_limit: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let t = limit(time_limit)?;
    let res = py
        .detach(|| gccm_core::exact::branch_and_bound(&g.inner, k, &VertexSet::full(g.inner.n()), t))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("set", res.set.into_vec())?;
    d.set_item("farness", res.farness)?;
    d.set_item("status", status_name(res.status))?;
    d.set_item("nodes", res.nodes)?;
    Ok(d)
}

/// Exact solve with iterated level models. `mode` is `grover` or `ilpind`;
/// `backend` is `builtin` or `cmd:<template>`.
#[pyfunction]
#[pyo3(signature = (g, k, mode = "grover", backend = "builtin", time_limit = 600.0))]
fn solve<'py>(
    py: Python<'py>,
    g: &PyGraph,
    k: usize,
    mode: &str,
    backend: &str,
    time_limit: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let config = SolveConfig {
        mode: mode.parse::<Mode>().map_err(err)?,
        backend: backend.parse::<BackendChoice>().map_err(err)?,
        time_limit: limit(Some(time_limit))?.unwrap_or_default(),
    };
    let out = py.detach(|| solve_iteratively(&g.inner, k, &config)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("status", status_name(out.status))?;
    d.set_item("set", out.set.map(VertexSet::into_vec))?;
    d.set_item("farness", out.farness)?;
    d.set_item("iterations", out.iterations)?;
    d.set_item(
        "variable_counts",
        out.history.iter().map(|h| h.variables).collect::<Vec<_>>(),
    )?;
    if let Some(r) = &out.reduction {
        d.set_item("dominated", r.dominated.len())?;
        d.set_item("absorbed", r.absorbed.len())?;
    }
    d.set_item("total_ms", out.timings.total_ms)?;
    Ok(d)
}

/// The flower family on which greedy has no approximation guarantee.
/// Returns the graph and a dict with `center` and `ends`.
#[pyfunction]
#[pyo3(signature = (r, k = 2))]
fn gen_counterexample<'py>(py: Python<'py>, r: usize, k: usize) -> PyResult<(PyGraph, Bound<'py, PyDict>)> {
    if r < 2 || k < 2 {
        return Err(PyValueError::new_err("counterexample needs r >= 2 and k >= 2"));
    }
    let (g, marks) = gen_flowers(r, k);
    let d = PyDict::new(py);
    d.set_item("center", marks.center)?;
    d.set_item("ends", marks.ends)?;
    Ok((PyGraph { inner: g }, d))
}

#[pyfunction]
fn gen_random_connected(n: usize, p: f64, seed: u64) -> PyGraph {
    PyGraph {
        inner: gen_gnp(n, p, seed),
    }
}

#[pymodule]
fn gccm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(farness, m)?)?;
    m.add_function(wrap_pyfunction!(closeness, m)?)?;
    m.add_function(wrap_pyfunction!(distances_to_set, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(greedy, m)?)?;
    m.add_function(wrap_pyfunction!(approx, m)?)?;
    m.add_function(wrap_pyfunction!(local_search, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(branch_and_bound, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(gen_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random_connected, m)?)?;
    Ok(())
}
