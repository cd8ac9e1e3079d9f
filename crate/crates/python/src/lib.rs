//! Python module `isoptope`: polytopes, moments, isotropic constants,
//! hinging derivatives, shaking, Monte Carlo checks and local ascent.

use isoptope::extremality::{self, HingeSpec};
use isoptope::optimize::{self, AscentConfig, AscentMode};
use isoptope::polytope::{self, Halfspace, PolytopeH, PolytopeV};
use isoptope::sample::{self, RngSeed};
use isoptope::{fixtures, hull, isotropy, json, symmetry, Error};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn to_py_err(e: Error) -> PyErr {
    if e.is_numeric() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Serializes through JSON and parses with Python's `json`, giving plain dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = json::to_string(value).map_err(to_py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A convex polytope given by vertices and outward-oriented simplicial facets.
#[pyclass(module = "isoptope", name = "Polytope", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolytope {
    inner: PolytopeV,
}

impl PyPolytope {
    fn wrap(inner: PolytopeV) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyPolytope {
    /// Builds a polytope from vertices; the hull is computed when `facets` is omitted.
    #[new]
    #[pyo3(signature = (vertices, facets=None, validate=true))]
    fn new(vertices: Vec<Vec<f64>>, facets: Option<Vec<Vec<usize>>>, validate: bool) -> PyResult<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(PyValueError::new_err("vertices of different lengths"));
        }
        let p = match facets {
            Some(f) => PolytopeV::new(dim, vertices, f),
            None => hull::facet_enumeration(&vertices).map_err(to_py_err)?,
        };
        if validate {
            polytope::validate(&p).into_result().map_err(to_py_err)?;
        }
        Ok(Self::wrap(p))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let p = PolytopeV::from_json(text).map_err(to_py_err)?;
        polytope::validate(&p).into_result().map_err(to_py_err)?;
        Ok(Self::wrap(p))
    }

    /// Builds a polytope from `(normal, offset)` pairs meaning `normal · x ≤ offset`.
    #[staticmethod]
    fn from_halfspaces(halfspaces: Vec<(Vec<f64>, f64)>) -> PyResult<Self> {
        let dim = halfspaces.first().map_or(0, |h| h.0.len());
        let h = PolytopeH {
            dim,
            halfspaces: halfspaces.into_iter().map(|(n, b)| Halfspace::new(n, b)).collect(),
        };
        hull::polytope_from_halfspaces(&h).map(Self::wrap).map_err(to_py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices.clone()
    }

    #[getter]
    fn facets(&self) -> Vec<Vec<usize>> {
        self.inner.facets.clone()
    }

    /// `(normal, offset)` pairs, one per facet, in facet order.
    fn halfspaces(&self) -> PyResult<Vec<(Vec<f64>, f64)>> {
        let h = polytope::to_halfspaces(&self.inner).map_err(to_py_err)?;
        Ok(h.halfspaces.into_iter().map(|h| (h.normal, h.offset)).collect())
    }

    /// List of violated conditions; empty for a valid polytope.
    fn validate(&self) -> Vec<String> {
        polytope::validate(&self.inner)
            .violations
            .iter()
            .map(|v| format!("{v:?}"))
            .collect()
    }

    /// Volume, centroid, raw second moment and covariance.
    fn moments<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &polytope::moments(&self.inner).map_err(to_py_err)?)
    }

    fn volume(&self) -> PyResult<f64> {
        Ok(polytope::moments(&self.inner).map_err(to_py_err)?.volume)
    }

    /// The isotropic constant `L`.
    fn isotropic_constant(&self) -> PyResult<f64> {
        isotropy::isotropic_constant(&self.inner).map_err(to_py_err)
    }

    /// `L^{2d} = det(Cov) / vol²`.
    fn isotropic_constant_pow_2d(&self) -> PyResult<f64> {
        isotropy::isotropic_constant_pow_2d(&self.inner).map_err(to_py_err)
    }

    /// The isotropic image (centroid 0, covariance I).
    fn isotropic(&self) -> PyResult<Self> {
        isotropy::isotropic_position(&self.inner)
            .map(|r| Self::wrap(r.body))
            .map_err(to_py_err)
    }

    /// First-order residuals, one list per facet with one entry per apex; needs isotropic position.
    fn foc_residuals(&self) -> PyResult<Vec<Vec<f64>>> {
        let r = extremality::foc_residuals(&self.inner).map_err(to_py_err)?;
        Ok(r.into_iter().map(|r| r.per_vertex).collect())
    }

    /// Analytic hinging derivatives of facet `facet` about the ridge opposite its vertex `apex`.
    fn hinge_derivative<'py>(&self, py: Python<'py>, facet: usize, apex: usize) -> PyResult<Bound<'py, PyAny>> {
        let spec = HingeSpec {
            facet_index: facet,
            apex_index: apex,
            angle: 0.0,
        };
        to_py(
            py,
            &extremality::hinge_derivative(&self.inner, &spec).map_err(to_py_err)?,
        )
    }

    /// Central finite difference of `L^{2d}` under the same hinge, with step `h`.
    #[pyo3(signature = (facet, apex, h=1e-4))]
    fn hinge_finite_difference(&self, facet: usize, apex: usize, h: f64) -> PyResult<f64> {
        let spec = HingeSpec {
            facet_index: facet,
            apex_index: apex,
            angle: 0.0,
        };
        extremality::finite_difference_dl2d(&self.inner, &spec, h).map_err(to_py_err)
    }

    /// The body with one facet hinged by angle `t`.
    fn hinged(&self, facet: usize, apex: usize, t: f64) -> PyResult<Self> {
        let spec = HingeSpec {
            facet_index: facet,
            apex_index: apex,
            angle: t,
        };
        extremality::hinge_polytope(&self.inner, &spec)
            .map(Self::wrap)
            .map_err(to_py_err)
    }

    /// Shakes towards the hyperplane orthogonal to `direction`; returns `(body, L_before, L_after)`.
    fn shake(&self, direction: Vec<f64>) -> PyResult<(Self, f64, f64)> {
        let r = symmetry::shake(&self.inner, &direction).map_err(to_py_err)?;
        Ok((Self::wrap(r.body), r.l_before, r.l_after))
    }

    /// First-order, ridge-reflection and congruence summary of the isotropic image.
    fn extremality_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &optimize::report_extremality(&self.inner).map_err(to_py_err)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "Polytope(dim={}, vertices={}, facets={})",
            self.inner.dim,
            self.inner.vertices.len(),
            self.inner.facets.len()
        )
    }
}

#[pyfunction]
fn cube(d: usize) -> PyPolytope {
    PyPolytope::wrap(fixtures::cube(d))
}

#[pyfunction]
fn regular_simplex(d: usize) -> PyPolytope {
    PyPolytope::wrap(fixtures::regular_simplex_isotropic(d))
}

/// Hull of `n` seeded uniform points on the unit sphere.
#[pyfunction]
fn random_simplicial(d: usize, n: usize, seed: u64) -> PyResult<PyPolytope> {
    fixtures::random_simplicial(d, n, seed)
        .map(PyPolytope::wrap)
        .map_err(to_py_err)
}

/// `E|X|²` under the density on a facet simplex proportional to the barycentric coordinate of vertex `k`.
#[pyfunction]
fn facet_second_moment(vertices: Vec<Vec<f64>>, k: usize) -> PyResult<f64> {
    if k >= vertices.len() {
        return Err(PyValueError::new_err("apex out of range"));
    }
    Ok(extremality::facet_second_moment(&vertices, k))
}

/// Monte Carlo estimate `(mean, std_error)` of the facet second moment.
#[pyfunction]
#[pyo3(signature = (vertices, k, n, seed, stream=0))]
fn facet_second_moment_estimate(
    vertices: Vec<Vec<f64>>,
    k: usize,
    n: usize,
    seed: u64,
    stream: u64,
) -> PyResult<(f64, f64)> {
    let e = sample::facet_second_moment_estimate(&vertices, k, n, RngSeed::new(seed).with_stream(stream))
        .map_err(to_py_err)?;
    Ok((e.mean, e.std_error))
}

/// Monte Carlo estimate `(mean, std_error)` of `M_2`, the mean squared relative volume of a random simplex.
#[pyfunction]
#[pyo3(signature = (p, n, seed, stream=0))]
fn m2_estimate(p: &PyPolytope, n: usize, seed: u64, stream: u64) -> PyResult<(f64, f64)> {
    let e = sample::m2_estimate(&p.inner, n, RngSeed::new(seed).with_stream(stream)).map_err(to_py_err)?;
    Ok((e.mean, e.std_error))
}

/// Uniform sample of `n` points.
#[pyfunction]
#[pyo3(signature = (p, n, seed, stream=0))]
fn sample_uniform(p: &PyPolytope, n: usize, seed: u64, stream: u64) -> PyResult<Vec<Vec<f64>>> {
    sample::sample_uniform(&p.inner, n, RngSeed::new(seed).with_stream(stream)).map_err(to_py_err)
}

/// Local ascent of `L`; returns the final body and the CSV trace.
#[pyfunction]
#[pyo3(signature = (p, seed, mode="hinge", iters=1000, step=0.1, shrink=0.5, foc_tol=1e-6))]
fn ascend(
    p: &PyPolytope,
    seed: u64,
    mode: &str,
    iters: usize,
    step: f64,
    shrink: f64,
    foc_tol: f64,
) -> PyResult<(PyPolytope, String)> {
    let mode = match mode {
        "hinge" => AscentMode::HingeAscent,
        "vertex" => AscentMode::VertexPerturb,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown mode {other:?}; use \"hinge\" or \"vertex\""
            )))
        }
    };
    let cfg = AscentConfig {
        step_init: step,
        step_shrink: shrink,
        max_iters: iters,
        foc_tol,
        seed: RngSeed::new(seed),
        mode,
    };
    let trace = optimize::ascend(&p.inner, &cfg).map_err(to_py_err)?;
    let csv = trace.to_csv();
    Ok((PyPolytope::wrap(trace.final_body), csv))
}

#[pymodule]
#[pyo3(name = "isoptope")]
fn isoptope_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolytope>()?;
    m.add_function(wrap_pyfunction!(cube, m)?)?;
    m.add_function(wrap_pyfunction!(regular_simplex, m)?)?;
    m.add_function(wrap_pyfunction!(random_simplicial, m)?)?;
    m.add_function(wrap_pyfunction!(facet_second_moment, m)?)?;
    m.add_function(wrap_pyfunction!(facet_second_moment_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(m2_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(ascend, m)?)?;
    Ok(())
}
