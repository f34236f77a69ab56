//! Python bindings for `hardy_core`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use hardy_core::alpha_mu::{conjugate_exponent, mu_of_alpha as core_mu, AlphaMuCurve, CurveOptions, ProfileGrid};
use hardy_core::cli::{parse_weight, report as core_report, EXIT_NO_CONVERGENCE};
use hardy_core::constants::HardyConstants;
use hardy_core::rearrangement::{rearranged_weight, HomogeneousWeight};
use hardy_core::spectral::lowest_eigenvalue_converged;
use hardy_core::weights::{lp_norm, WeightSpec};
use hardy_core::Error;

fn err(e: Error) -> PyErr {
    if hardy_core::cli::exit_code(&e) == EXIT_NO_CONVERGENCE {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None().into_bound(py),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any(),
        serde_json::Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        serde_json::Value::Object(o) => {
            let dict = PyDict::new(py);
            for (k, x) in o {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// Angular weight Φ(θ), parsed from `constant:<c>`, `cap:<a>,<theta_c>`,
/// `polar_power:<a>,<beta>` or `tabulated:@<file>`.
#[pyclass(name = "Weight", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWeight {
    inner: WeightSpec,
}

#[pymethods]
impl PyWeight {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_weight(spec).map_err(err)? })
    }

    #[staticmethod]
    fn tabulated(angles: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: WeightSpec::tabulated(angles, values).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __call__(&self, theta: f64) -> PyResult<f64> {
        self.inner.evaluate(theta).map_err(err)
    }

    fn lp_norm(&self, p: f64, d: usize) -> PyResult<f64> {
        lp_norm(&self.inner, p, d).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Weight('{}')", self.inner.describe())
    }
}

/// Hardy constant τ with the data that identifies it.
#[pyclass(name = "HardyConstants", frozen)]
struct PyConstants {
    inner: HardyConstants,
}

#[pymethods]
impl PyConstants {
    #[staticmethod]
    fn main(weight: &PyWeight, d: usize, p: f64) -> PyResult<Self> {
        Ok(Self { inner: HardyConstants::main(&weight.inner, d, p).map_err(err)? })
    }

    #[staticmethod]
    fn main2(weight: &PyWeight, d: usize, p: f64) -> PyResult<Self> {
        Ok(Self { inner: HardyConstants::main2(&weight.inner, d, p).map_err(err)? })
    }

    #[staticmethod]
    fn theorem4(weight: &PyWeight, d: usize, p: f64, nu: f64, curve: &PyCurve) -> PyResult<Self> {
        Ok(Self { inner: HardyConstants::theorem4(&weight.inner, d, p, nu, &curve.inner).map_err(err)? })
    }

    #[staticmethod]
    fn fractional(weight: &PyWeight, d: usize, kappa: f64) -> PyResult<Self> {
        Ok(Self { inner: HardyConstants::fractional(&weight.inner, d, kappa).map_err(err)? })
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }

    #[getter]
    fn nu0(&self) -> Option<f64> {
        self.inner.nu0
    }

    #[getter]
    fn nu(&self) -> Option<f64> {
        self.inner.nu
    }

    #[getter]
    fn theorem_id(&self) -> String {
        self.inner.theorem_id.to_string()
    }

    #[getter]
    fn formula(&self) -> String {
        self.inner.formula.clone()
    }

    #[getter]
    fn lp_norm(&self) -> f64 {
        self.inner.lp_norm
    }

    fn as_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serialize(py, &self.inner)
    }
}

/// Sampled μ(α) curve.
#[pyclass(name = "AlphaMuCurve", frozen)]
struct PyCurve {
    inner: AlphaMuCurve,
}

#[pymethods]
impl PyCurve {
    #[new]
    #[pyo3(signature = (d, p, samples = 48, max_factor = 40.0))]
    fn new(py: Python<'_>, d: usize, p: f64, samples: usize, max_factor: f64) -> PyResult<Self> {
        let inner = py
            .detach(|| AlphaMuCurve::build(d, p, CurveOptions::new(samples, max_factor)))
            .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.inner.threshold
    }

    /// `(alpha, mu, residual)` for every sample.
    fn samples(&self) -> Vec<(f64, f64, f64)> {
        self.inner.samples.iter().map(|s| (s.alpha, s.mu, s.residual)).collect()
    }

    fn mu_at(&self, alpha: f64) -> PyResult<f64> {
        self.inner.mu_at(alpha).map_err(err)
    }

    fn alpha_of_mu(&self, mu: f64) -> PyResult<f64> {
        self.inner.alpha_of_mu(mu).map_err(err)
    }
}

#[pyfunction]
fn surface_area(d: usize) -> PyResult<f64> {
    hardy_core::sphere::surface_area(d).map_err(err)
}

/// Lowest eigenvalue of `-Δ_θ - scale·Φ` on S^{d-1}.
#[pyfunction]
#[pyo3(signature = (weight, d, scale = 1.0))]
fn lowest_eigenvalue(py: Python<'_>, weight: &PyWeight, d: usize, scale: f64) -> PyResult<f64> {
    let spec = weight.inner.scaled(scale).map_err(err)?;
    let res = py.detach(|| lowest_eigenvalue_converged(&spec, d, 32, 1024, 1e-8)).map_err(err)?;
    if !res.converged {
        return Err(PyRuntimeError::new_err(format!("lowest eigenvalue not converged at degree {}", res.degree)));
    }
    Ok(res.lambda1)
}

/// μ(α) for the exponent pair (p, p/(p-1)) on S^{d-1}.
#[pyfunction]
fn mu_of_alpha(py: Python<'_>, alpha: f64, d: usize, p: f64) -> PyResult<f64> {
    let q = conjugate_exponent(p);
    py.detach(|| core_mu(alpha, d, q, ProfileGrid::for_alpha(alpha, q))).map(|s| s.mu).map_err(err)
}

/// Coefficient c of the rearrangement `c/|x|^{2κ}` of `Φ(x/|x|)/|x|^{2κ}`.
#[pyfunction]
fn rearranged_coefficient(weight: &PyWeight, d: usize, kappa: f64) -> PyResult<f64> {
    let w = HomogeneousWeight::new(weight.inner.clone(), kappa, d).map_err(err)?;
    rearranged_weight(&w).map(|r| r.coefficient).map_err(err)
}

/// Full pipeline; one dict per (trial function, theorem) pair.
#[pyfunction]
#[pyo3(signature = (d, p, weight, nu = Vec::new(), samples = 16, tau_scale = 1.0))]
fn report<'py>(
    py: Python<'py>,
    d: usize,
    p: f64,
    weight: &PyWeight,
    nu: Vec<f64>,
    samples: usize,
    tau_scale: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = weight.inner.clone();
    let rows = py.detach(|| core_report(d, p, &spec, &nu, samples, tau_scale)).map_err(err)?;
    serialize(py, &rows)
}

#[pymodule]
fn hardy_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeight>()?;
    m.add_class::<PyConstants>()?;
    m.add_class::<PyCurve>()?;
    m.add_function(wrap_pyfunction!(surface_area, m)?)?;
    m.add_function(wrap_pyfunction!(lowest_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(mu_of_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(rearranged_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    Ok(())
}
