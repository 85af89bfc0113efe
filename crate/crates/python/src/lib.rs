//! Python bindings for `unruh-tangle`.
//!
//! ```python
//! import unruh_tangle_py as ut
//! rho = ut.PureState.ghz().reduced("A", 0.7853981633974483)
//! ut.optimize_roof(rho).average_tangle  # 0.5
//! ```

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use unruh_tangle::convexroof as roof;
use unruh_tangle::{measures, states, unruh, Error, Qubit, Register};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvariantViolation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn qubit(label: &str) -> PyResult<Qubit> {
    label.parse().map_err(to_py)
}

fn angle(r: f64) -> PyResult<unruh::RindlerParams> {
    unruh::RindlerParams::from_angle(r).map_err(to_py)
}

fn labels(reg: &Register) -> Vec<String> {
    reg.labels().iter().map(|q| q.to_string()).collect()
}

#[pyclass(name = "PureState", module = "unruh_tangle_py", skip_from_py_object)]
#[derive(Clone)]
struct PyPureState {
    inner: states::PureState,
}

#[pymethods]
impl PyPureState {
    /// Normalizes `amplitudes`; the register defaults to `A, B, C, ...`.
    #[new]
    #[pyo3(signature = (amplitudes, register = None))]
    fn new(amplitudes: Vec<Complex64>, register: Option<Vec<String>>) -> PyResult<Self> {
        let n = amplitudes.len().max(1).trailing_zeros() as usize;
        let register = match register {
            Some(names) => Register::new(names.iter().map(|s| qubit(s)).collect::<PyResult<_>>()?).map_err(to_py)?,
            None => Register::parties(n).map_err(to_py)?,
        };
        let inner = states::PureState::from_amplitudes(register, amplitudes).map_err(to_py)?;
        Ok(PyPureState { inner })
    }

    #[staticmethod]
    fn ghz() -> Self {
        PyPureState {
            inner: states::PureState::ghz(),
        }
    }

    #[staticmethod]
    fn w() -> Self {
        PyPureState {
            inner: states::PureState::w(),
        }
    }

    #[staticmethod]
    fn bell00() -> Self {
        PyPureState {
            inner: states::PureState::bell00(),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (seed, qubits = 3))]
    fn random(seed: u64, qubits: usize) -> PyResult<Self> {
        let register = Register::parties(qubits).map_err(to_py)?;
        Ok(PyPureState {
            inner: states::PureState::random(register, seed),
        })
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    #[getter]
    fn register(&self) -> Vec<String> {
        labels(self.inner.register())
    }

    /// Norm of the amplitudes as given, before rescaling.
    #[getter]
    fn normalization(&self) -> f64 {
        self.inner.normalization()
    }

    fn concurrence(&self) -> PyResult<f64> {
        Ok(measures::concurrence_pure(&self.inner).map_err(to_py)?.value)
    }

    fn three_tangle(&self) -> PyResult<f64> {
        Ok(measures::three_tangle_pure(&self.inner).map_err(to_py)?.value)
    }

    #[pyo3(signature = (focus = "A"))]
    fn monogamy_residual(&self, focus: &str) -> PyResult<f64> {
        measures::monogamy_residual(&self.inner, qubit(focus)?).map_err(to_py)
    }

    /// Accelerate `party` at angle `r` and trace out region II.
    fn reduced(&self, party: &str, r: f64) -> PyResult<PyDensityMatrix> {
        let inner = unruh::reduced_state(&self.inner, qubit(party)?, &angle(r)?).map_err(to_py)?;
        Ok(PyDensityMatrix { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "PureState(register={:?}, dim={})",
            self.register(),
            self.inner.amplitudes().len()
        )
    }
}

#[pyclass(name = "AcinParams", module = "unruh_tangle_py", skip_from_py_object)]
#[derive(Clone)]
struct PyAcinParams {
    inner: states::AcinParams,
}

#[pymethods]
impl PyAcinParams {
    #[new]
    #[pyo3(signature = (weights, phi = 0.0))]
    fn new(weights: [f64; 5], phi: f64) -> PyResult<Self> {
        Ok(PyAcinParams {
            inner: states::AcinParams::new(weights, phi).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn ghz() -> Self {
        PyAcinParams {
            inner: states::AcinParams::ghz(),
        }
    }

    #[staticmethod]
    fn random(seed: u64) -> Self {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        PyAcinParams {
            inner: states::AcinParams::random(&mut rng),
        }
    }

    #[getter]
    fn weights(&self) -> [f64; 5] {
        self.inner.lambda()
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.inner.phi()
    }

    fn state(&self) -> PyPureState {
        PyPureState {
            inner: states::PureState::from_acin(&self.inner),
        }
    }

    fn three_tangle(&self) -> f64 {
        measures::three_tangle_acin(&self.inner).value
    }

    fn __repr__(&self) -> String {
        format!(
            "AcinParams(weights={:?}, phi={})",
            self.inner.lambda(),
            self.inner.phi()
        )
    }
}

#[pyclass(name = "DensityMatrix", module = "unruh_tangle_py", skip_from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: states::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[getter]
    fn register(&self) -> Vec<String> {
        labels(self.inner.register())
    }

    /// Rows of the matrix.
    #[getter]
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.inner.matrix();
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
            .collect()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigen().values
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn concurrence(&self) -> PyResult<f64> {
        Ok(measures::concurrence_mixed(&self.inner).map_err(to_py)?.value)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(register={:?}, rank={})", self.register(), self.rank())
    }
}

#[pyclass(name = "RoofCandidate", module = "unruh_tangle_py", get_all)]
struct PyRoofCandidate {
    weights: Vec<f64>,
    states: Vec<PyPureState>,
    average_tangle: f64,
}

#[pyfunction]
#[pyo3(signature = (a, omega = 1.0, c = 1.0))]
fn r_from_acceleration(a: f64, omega: f64, c: f64) -> PyResult<f64> {
    unruh::r_from_acceleration(a, omega, c).map_err(to_py)
}

#[pyfunction]
fn analytic_mixed_tangle(params: PyRef<'_, PyAcinParams>, party: &str, r: f64) -> PyResult<f64> {
    Ok(roof::analytic_mixed_tangle(&params.inner, &angle(r)?, qubit(party)?)
        .map_err(to_py)?
        .value)
}

/// Mixed three-tangle of the reduced state of any three-qubit input, from
/// its phase-aligned eigendecomposition.
#[pyfunction]
fn spectral_mixed_tangle(state: PyRef<'_, PyPureState>, party: &str, r: f64) -> PyResult<f64> {
    Ok(roof::spectral_family(&state.inner, qubit(party)?, &angle(r)?)
        .map_err(to_py)?
        .average_tangle())
}

#[pyfunction]
#[pyo3(signature = (rho, m = 2, starts = 16, seed = 0))]
fn optimize_roof(
    py: Python<'_>,
    rho: PyRef<'_, PyDensityMatrix>,
    m: usize,
    starts: usize,
    seed: u64,
) -> PyResult<PyRoofCandidate> {
    let opts = roof::RoofOptions {
        starts,
        seed,
        ..roof::RoofOptions::default()
    };
    let inner = rho.inner.clone();
    let best = py
        .detach(|| roof::optimize_roof_with(&inner, m, &opts))
        .map_err(to_py)?;
    Ok(PyRoofCandidate {
        weights: best.weights,
        states: best.states.into_iter().map(|inner| PyPureState { inner }).collect(),
        average_tangle: best.average_tangle,
    })
}

#[pymodule]
fn unruh_tangle_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyAcinParams>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyRoofCandidate>()?;
    m.add_function(wrap_pyfunction!(r_from_acceleration, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_mixed_tangle, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_mixed_tangle, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_roof, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
