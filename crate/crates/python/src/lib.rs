//! Python bindings: `import charvol`.

use num_complex::Complex64;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use charvol::cohomology::{
    circle_cohomology, h1_basis_rose, random_good_rep, random_representation, relative_tangent_basis, SurfaceKind,
};
use charvol::mat::{dsigma, sigma as sigma_values, standard_frame};
use charvol::torsion::{nu_squared_via_torsion, nu_via_sigma, rose_volume_eval, witten_check};
use charvol::trace::{coordinate_volume, goldman_bracket, symplectic_eval, FormKey, Genericity, SymplecticKey, MARGIN};
use charvol::verify::{run_scenario, scenario_names, RunOptions, DEFAULT_SEED};
use charvol::{CMatrix, Error, GroupElement, LieElement, SurfaceConfig, Word};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::UnknownScenario { .. } | Error::UnknownForm(_) | Error::UnknownSurface(_) => {
            PyKeyError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn from_matrix(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn group_element(rows: Vec<Vec<Complex64>>) -> PyResult<GroupElement> {
    GroupElement::new(to_matrix(rows)?).map_err(py_err)
}

/// A representation of a free group, given by its generator images.
#[pyclass(name = "Representation", module = "charvol")]
struct PyRepresentation {
    inner: charvol::Representation,
}

#[pymethods]
impl PyRepresentation {
    #[new]
    fn new(generators: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let gens = generators.into_iter().map(group_element).collect::<PyResult<Vec<_>>>()?;
        let inner = charvol::Representation::new(gens).map_err(py_err)?;
        Ok(PyRepresentation { inner })
    }

    /// Seeded random representation with generators in SL(n).
    #[staticmethod]
    fn random(n: usize, k: usize, seed: u64) -> PyResult<Self> {
        let inner = random_representation(n, k, seed).map_err(py_err)?;
        Ok(PyRepresentation { inner })
    }

    /// Seeded sample meeting the genericity margins of a surface
    /// (`S03`, `S11`, `S04`, `S03_SL3`, `S04_SL3` or `rose:K`).
    #[staticmethod]
    #[pyo3(signature = (n, surface, seed, margin = MARGIN))]
    fn sample(n: usize, surface: &str, seed: u64, margin: f64) -> PyResult<Self> {
        let cfg = SurfaceConfig::from_name(surface).map_err(py_err)?;
        let gens = match cfg.kind {
            SurfaceKind::S11 => vec![Genericity::S11Chart],
            SurfaceKind::S04 => vec![Genericity::S04Chart],
            SurfaceKind::S03Sl3 | SurfaceKind::S04Sl3 if n == 3 => vec![Genericity::Sl3Commutator(1, 2)],
            _ => vec![],
        };
        let inner = random_good_rep(n, &cfg, &gens, margin, seed).map_err(py_err)?;
        Ok(PyRepresentation { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyRepresentation { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn generators(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner.generators().iter().map(|g| from_matrix(g.matrix())).collect()
    }

    /// Image of a word such as `[1, 2, -1]`.
    fn evaluate(&self, word: Vec<i32>) -> PyResult<Vec<Vec<Complex64>>> {
        let g = self.inner.evaluate(&Word::new(word)).map_err(py_err)?;
        Ok(from_matrix(g.matrix()))
    }

    fn trace(&self, word: Vec<i32>) -> PyResult<Complex64> {
        self.inner.trace(&Word::new(word)).map_err(py_err)
    }

    fn h1_dimension(&self) -> PyResult<usize> {
        Ok(h1_basis_rose(&self.inner).map_err(py_err)?.len())
    }

    fn relative_dimension(&self, surface: &str) -> PyResult<usize> {
        let cfg = SurfaceConfig::from_name(surface).map_err(py_err)?;
        Ok(relative_tangent_basis(&self.inner, &cfg).map_err(py_err)?.len())
    }

    fn __repr__(&self) -> String {
        format!("Representation(n={}, k={})", self.inner.n(), self.inner.k())
    }
}

/// Rose torsion volume form evaluated on the library's H^1 basis.
#[pyfunction]
fn rose_volume(rep: &PyRepresentation) -> PyResult<Complex64> {
    let rho = &rep.inner;
    let h = h1_basis_rose(rho).map_err(py_err)?;
    let frame = standard_frame(rho.n()).map_err(py_err)?;
    rose_volume_eval(rho, &h.classes, &frame).map_err(py_err)
}

/// `(prefactor, determinant, value)` of a registered coordinate form on
/// the same basis used by `rose_volume`.
#[pyfunction]
#[pyo3(signature = (rep, form, margin = MARGIN))]
fn coordinate_form(rep: &PyRepresentation, form: &str, margin: f64) -> PyResult<(Complex64, Complex64, Complex64)> {
    let key = FormKey::parse(form).map_err(py_err)?;
    let h = h1_basis_rose(&rep.inner).map_err(py_err)?;
    let v = coordinate_volume(&rep.inner, key, &h.classes, margin).map_err(py_err)?;
    Ok((v.prefactor, v.determinant, v.value))
}

/// `rose_volume / coordinate_form value`; its modulus is 1.
#[pyfunction]
#[pyo3(signature = (rep, form, margin = MARGIN))]
fn volume_ratio(rep: &PyRepresentation, form: &str, margin: f64) -> PyResult<Complex64> {
    let (_, _, value) = coordinate_form(rep, form, margin)?;
    Ok(rose_volume(rep)? / value)
}

/// Poisson bracket of the chart coordinates of a symplectic key.
#[pyfunction]
fn bracket(rep: &PyRepresentation, key: &str) -> PyResult<Complex64> {
    let key = SymplecticKey::parse(key).map_err(py_err)?;
    goldman_bracket(&rep.inner, key).map_err(py_err)
}

/// The symplectic form on the first two relative tangent vectors.
#[pyfunction]
#[pyo3(signature = (rep, key, margin = MARGIN))]
fn symplectic(rep: &PyRepresentation, key: &str, margin: f64) -> PyResult<Complex64> {
    let key = SymplecticKey::parse(key).map_err(py_err)?;
    let rel = relative_tangent_basis(&rep.inner, &key.surface()).map_err(py_err)?;
    if rel.len() < 2 {
        return Err(PyValueError::new_err("relative tangent space has dimension below 2"));
    }
    symplectic_eval(&rep.inner, key, &rel.classes[0], &rel.classes[1], margin).map_err(py_err)
}

/// `(lhs, rhs)` of the factorisation of the rose volume over a surface.
#[pyfunction]
#[pyo3(signature = (rep, surface, margin = MARGIN))]
fn witten(rep: &PyRepresentation, surface: &str, margin: f64) -> PyResult<(Complex64, Complex64)> {
    let cfg = SurfaceConfig::from_name(surface).map_err(py_err)?;
    let v = witten_check(&rep.inner, &cfg, margin).map_err(py_err)?;
    Ok((v.lhs, v.rhs))
}

/// Elementary symmetric functions sigma_1..sigma_{N-1} of the eigenvalues.
#[pyfunction]
fn sigma(matrix: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    Ok(sigma_values(&group_element(matrix)?).values)
}

/// Directional derivative of sigma along `(1 + e v) A`.
#[pyfunction]
fn dsigma_along(matrix: Vec<Vec<Complex64>>, direction: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    let a = group_element(matrix)?;
    let v = LieElement::new(to_matrix(direction)?).map_err(py_err)?;
    Ok(dsigma(&a, v.matrix()))
}

/// `(nu, nu^2 via circle torsion)` for a regular element, on the library's
/// H^1 basis of the circle.
#[pyfunction]
fn peripheral_form(matrix: Vec<Vec<Complex64>>) -> PyResult<(Complex64, Complex64)> {
    let a = group_element(matrix)?;
    let v = circle_cohomology(&a).map_err(py_err)?.h1;
    let nu = nu_via_sigma(&a, &v).map_err(py_err)?;
    let squared = nu_squared_via_torsion(&a, &v).map_err(py_err)?;
    Ok((nu, squared))
}

#[pyfunction]
fn scenarios() -> Vec<&'static str> {
    scenario_names()
}

/// Runs a scenario and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (name, trials = None, seed = DEFAULT_SEED, tol = None))]
fn verify(py: Python<'_>, name: &str, trials: Option<usize>, seed: u64, tol: Option<f64>) -> PyResult<String> {
    let opts = RunOptions {
        trials,
        seed,
        tolerance: tol,
        threads: None,
    };
    let report = py.detach(|| run_scenario(name, &opts)).map_err(py_err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule(name = "charvol")]
pub fn charvol_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRepresentation>()?;
    m.add_function(wrap_pyfunction!(rose_volume, m)?)?;
    m.add_function(wrap_pyfunction!(coordinate_form, m)?)?;
    m.add_function(wrap_pyfunction!(volume_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(bracket, m)?)?;
    m.add_function(wrap_pyfunction!(symplectic, m)?)?;
    m.add_function(wrap_pyfunction!(witten, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(dsigma_along, m)?)?;
    m.add_function(wrap_pyfunction!(peripheral_form, m)?)?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
