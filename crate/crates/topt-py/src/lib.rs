//! Python bindings for the topt compiler: circuit parsing and emission,
//! signature tensors, the tensor optimizers and the full compile pipeline.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use topt::bench;
use topt::circuit;
use topt::optimizers::{run_pipeline, OptimizerKind};
use topt::phase::SignatureTensor3;
use topt::resynth::{compile, HadamardMode};
use topt::OptimizerChoice;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kind(name: &str) -> PyResult<OptimizerKind> {
    OptimizerKind::parse(name).ok_or_else(|| value_err(format!("unknown optimizer `{name}`")))
}

/// A Clifford+T circuit over a data register and |+> ancillas.
#[pyclass(name = "Circuit")]
#[derive(Clone)]
struct PyCircuit {
    inner: circuit::Circuit,
}

#[pymethods]
impl PyCircuit {
    /// Parses the native line-oriented format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        circuit::parse(text)
            .map(|inner| PyCircuit { inner })
            .map_err(value_err)
    }

    /// Parses the `.qc` benchmark format (`.v` header, BEGIN/END, tof).
    #[staticmethod]
    fn parse_qc(text: &str) -> PyResult<Self> {
        circuit::parse_qc(text)
            .map(|inner| PyCircuit { inner })
            .map_err(value_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn ancillas(&self) -> usize {
        self.inner.h
    }

    fn width(&self) -> usize {
        self.inner.width()
    }

    /// Number of T and Tdg gates, including inside classical blocks.
    fn t_count(&self) -> usize {
        self.inner.t_count()
    }

    /// T count with CCZ/CS lowered to CNOT+T (7 and 3 respectively).
    fn t_count_expanded(&self) -> usize {
        self.inner.t_count_expanded()
    }

    fn emit(&self) -> String {
        circuit::emit(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(n={}, ancillas={}, gates={}, t_count={})",
            self.inner.n,
            self.inner.h,
            self.inner.gates.len(),
            self.inner.t_count()
        )
    }
}

/// Symmetric order-3 GF(2) tensor, the optimizer's problem instance.
#[pyclass(name = "SignatureTensor")]
#[derive(Clone)]
struct PySignatureTensor {
    inner: SignatureTensor3,
}

#[pymethods]
impl PySignatureTensor {
    #[new]
    fn new(n: usize) -> Self {
        PySignatureTensor { inner: SignatureTensor3::new(n) }
    }

    /// Uniform random tensor, deterministic per (n, seed).
    #[staticmethod]
    fn random(n: usize, seed: u64) -> Self {
        PySignatureTensor { inner: bench::random_signature(n, seed) }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn get(&self, a: usize, b: usize, c: usize) -> bool {
        self.inner.get(a, b, c)
    }

    fn set_diag(&mut self, a: usize, v: bool) {
        self.inner.set_diag(a, v);
    }

    fn set_pair(&mut self, a: usize, b: usize, v: bool) {
        self.inner.set_pair(a, b, v);
    }

    fn set_triple(&mut self, a: usize, b: usize, c: usize, v: bool) {
        self.inner.set_triple(a, b, c, v);
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __repr__(&self) -> String {
        format!("SignatureTensor(n={})", self.inner.n())
    }
}

/// Compiles a circuit with the chosen optimizer and Hadamard strategy.
/// Returns the optimized circuit and a report dict.
#[pyfunction]
#[pyo3(signature = (circuit, optimizer="todd", hadamard="gadget", h_cap=None, seed=0))]
fn optimize(
    py: Python<'_>,
    circuit: &PyCircuit,
    optimizer: &str,
    hadamard: &str,
    h_cap: Option<usize>,
    seed: u64,
) -> PyResult<(PyCircuit, Py<PyDict>)> {
    let kind = parse_kind(optimizer)?;
    let mode = match hadamard.to_ascii_lowercase().as_str() {
        "gadget" => HadamardMode::Gadget,
        "partition" => HadamardMode::Partition,
        other => return Err(value_err(format!("unknown hadamard mode `{other}`"))),
    };
    let (out, report) = compile(&circuit.inner, &OptimizerChoice::with_seed(kind, seed), mode, h_cap)
        .map_err(value_err)?;
    let dict = PyDict::new(py);
    dict.set_item("n", report.n)?;
    dict.set_item("ancillas", report.h)?;
    dict.set_item("partitions", report.n_p)?;
    dict.set_item("t_before", report.t_before)?;
    dict.set_item("t_after", report.t_after)?;
    dict.set_item("optimizer", kind.name())?;
    Ok((PyCircuit { inner: out }, dict.into()))
}

/// Simulates both circuits on random inputs across all measurement branches.
/// Returns (equivalent, worst branch infidelity).
#[pyfunction]
fn verify_equivalence(original: &PyCircuit, compiled: &PyCircuit) -> PyResult<(bool, f64)> {
    bench::verify_equivalence(&original.inner, &compiled.inner).map_err(value_err)
}

/// Factorizes a signature tensor; returns the proper gate synthesis matrix
/// as a list of columns, each column the list of its set row indices. The
/// column count is the synthesized T count.
#[pyfunction]
#[pyo3(signature = (tensor, optimizer="todd", seed=0))]
fn factor_tensor(
    tensor: &PySignatureTensor,
    optimizer: &str,
    seed: u64,
) -> PyResult<Vec<Vec<usize>>> {
    let kind = parse_kind(optimizer)?;
    let a = run_pipeline(&tensor.inner, &OptimizerChoice::with_seed(kind, seed))
        .map_err(value_err)?
        .proper();
    Ok((0..a.cols())
        .map(|j| a.col(j).iter_ones().collect())
        .collect())
}

#[pymodule]
fn topt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_class::<PySignatureTensor>()?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(verify_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(factor_tensor, m)?)?;
    Ok(())
}
