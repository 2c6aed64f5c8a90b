//! Python bindings for hilbert-core.
//!
//! Points and vectors cross the boundary as lists of floats; structured
//! results (reports, fits, descriptors) come back as dicts.

use hilbert_core::bilipschitz::{
    bernig_inverse, bernig_map, distortion_report, finsler_comparison, ComparisonConfig, DistortionConfig, DualVector,
};
use hilbert_core::embedding::LogEmbedding;
use hilbert_core::metric::{distance_alexander, distance_birkhoff, distance_crossratio, finsler_norm};
use hilbert_core::polytope::{boundary_intersection, vrep_from_hrep};
use hilbert_core::volume::{
    ball_boundary, ball_volume, default_quadrature_directions, exact_planar_density, finsler_density, growth_fit,
    ray_divergence_ratio, McConfig, Measure, Sampler,
};
use hilbert_core::{AffineFunctional, GeomError, HRep, Point, PolytopeFile, VRep};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(hilbert_geom, GeometryError, PyValueError, "A geometric invariant was violated.");

fn err(e: GeomError) -> PyErr {
    GeometryError::new_err((e.invariant(), e.to_string()))
}

/// Serialize through JSON into plain Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn list(p: &Point) -> Vec<f64> {
    p.iter().copied().collect()
}

fn parse_measure(name: &str) -> PyResult<Measure> {
    match name {
        "busemann" => Ok(Measure::Busemann),
        "holmes-thompson" | "holmes_thompson" => Ok(Measure::HolmesThompson),
        _ => Err(PyValueError::new_err(format!("unknown measure `{name}`"))),
    }
}

fn parse_sampler(name: &str) -> PyResult<Sampler> {
    match name {
        "dual-log" | "dual_log" => Ok(Sampler::DualLog),
        "euclidean-box" | "euclidean_box" => Ok(Sampler::EuclideanBox),
        _ => Err(PyValueError::new_err(format!("unknown sampler `{name}`"))),
    }
}

/// A bounded convex polytope with nonempty interior, stored by its facets.
#[pyclass(name = "Polytope", frozen, module = "hilbert_geom")]
struct PyPolytope {
    h: HRep,
}

impl PyPolytope {
    fn point(&self, c: Vec<f64>) -> PyResult<Point> {
        if c.len() != self.h.dim() {
            return Err(err(GeomError::WrongDimension { expected: self.h.dim(), got: c.len() }));
        }
        Ok(Point::from_vec(c))
    }

    fn center_or_default(&self, c: Option<Vec<f64>>) -> PyResult<Point> {
        match c {
            Some(c) => self.point(c),
            None => self.h.analytic_center().map_err(err),
        }
    }
}

#[pymethods]
impl PyPolytope {
    #[staticmethod]
    fn from_vertices(vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        let v = VRep::hull(dim, vertices.into_iter().map(Point::from_vec).collect()).map_err(err)?;
        Ok(Self { h: hrep_from(&v)? })
    }

    /// Facets `gradient·x + offset > 0`.
    #[staticmethod]
    fn from_halfspaces(gradients: Vec<Vec<f64>>, offsets: Vec<f64>) -> PyResult<Self> {
        if gradients.len() != offsets.len() {
            return Err(PyValueError::new_err("gradients and offsets differ in length"));
        }
        let dim = gradients.first().map_or(0, Vec::len);
        let f = gradients.into_iter().zip(offsets).map(|(g, r)| AffineFunctional::new(g, r)).collect();
        Ok(Self { h: HRep::new(dim, f).map_err(err)? })
    }

    /// Parse the polytope JSON file format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { h: PolytopeFile::parse(text).and_then(|f| f.to_hrep()).map_err(err)? })
    }

    #[staticmethod]
    fn cube(lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Self> {
        Ok(Self { h: HRep::cube(&lo, &hi).map_err(err)? })
    }

    #[staticmethod]
    fn simplex(n: usize) -> Self {
        Self { h: HRep::standard_simplex(n) }
    }

    #[staticmethod]
    #[pyo3(signature = (k, radius=1.0))]
    fn regular_polygon(k: usize, radius: f64) -> PyResult<Self> {
        Ok(Self { h: HRep::regular_polygon(k, [0.0, 0.0], radius).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&PolytopeFile::from_hrep(&self.h)).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.h.dim()
    }

    #[getter]
    fn num_facets(&self) -> usize {
        self.h.num_facets()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.h.vertices().iter().map(list).collect()
    }

    /// `(gradient, offset)` pairs, unit-normalized.
    #[getter]
    fn halfspaces(&self) -> Vec<(Vec<f64>, f64)> {
        self.h.functionals().iter().map(|f| (f.gradient.iter().copied().collect(), f.offset)).collect()
    }

    fn analytic_center(&self) -> PyResult<Vec<f64>> {
        self.h.analytic_center().map(|c| list(&c)).map_err(err)
    }

    fn contains(&self, x: Vec<f64>) -> PyResult<bool> {
        Ok(self.h.is_interior(&self.point(x)?))
    }

    /// Hilbert distance; `method` is `birkhoff`, `crossratio` or `alexander` (2-D).
    #[pyo3(signature = (p, q, method="birkhoff"))]
    fn distance(&self, p: Vec<f64>, q: Vec<f64>, method: &str) -> PyResult<f64> {
        let (p, q) = (self.point(p)?, self.point(q)?);
        match method {
            "birkhoff" => distance_birkhoff(&self.h, &p, &q),
            "crossratio" => distance_crossratio(&self.h, &p, &q),
            "alexander" => vrep_from_hrep(&self.h).and_then(|v| distance_alexander(&v, &p, &q)),
            _ => return Err(PyValueError::new_err(format!("unknown method `{method}`"))),
        }
        .map_err(err)
    }

    /// Boundary points `(a, b)` of the line through `p` and `q`, `a` beyond `p`.
    fn chord(&self, p: Vec<f64>, q: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let (p, q) = (self.point(p)?, self.point(q)?);
        let c = boundary_intersection(&self.h, &p, &(&q - &p)).map_err(err)?;
        Ok((list(&c.a), list(&c.b)))
    }

    fn finsler(&self, p: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
        finsler_norm(&self.h, &self.point(p)?, &self.point(v)?).map_err(err)
    }

    /// Busemann or Holmes–Thompson density; exact in 2-D unless `directions` is given.
    #[pyo3(signature = (x, measure="busemann", directions=None))]
    fn density(&self, x: Vec<f64>, measure: &str, directions: Option<usize>) -> PyResult<f64> {
        let (x, m) = (self.point(x)?, parse_measure(measure)?);
        match directions {
            None if self.h.dim() == 2 => exact_planar_density(&self.h, &x, m),
            k => finsler_density(&self.h, &x, m, k.unwrap_or_else(|| default_quadrature_directions(self.h.dim()))),
        }
        .map_err(err)
    }

    #[pyo3(signature = (center, radius, directions=256))]
    fn ball_boundary(&self, center: Vec<f64>, radius: f64, directions: usize) -> PyResult<Vec<Vec<f64>>> {
        let b = ball_boundary(&self.h, &self.point(center)?, radius, directions).map_err(err)?;
        Ok(b.points.iter().map(list).collect())
    }

    #[pyo3(signature = (radius, center=None, measure="busemann", samples=100_000, seed=0, sampler="dual-log"))]
    #[allow(clippy::too_many_arguments)]
    fn ball_volume<'py>(
        &self,
        py: Python<'py>,
        radius: f64,
        center: Option<Vec<f64>>,
        measure: &str,
        samples: usize,
        seed: u64,
        sampler: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let o = self.center_or_default(center)?;
        let (m, sampler) = (parse_measure(measure)?, parse_sampler(sampler)?);
        let cfg = McConfig { samples, seed, sampler, ..Default::default() };
        let v = py.detach(|| ball_volume(&self.h, &o, radius, m, &cfg)).map_err(err)?;
        to_py(py, &v)
    }

    #[pyo3(signature = (radii, center=None, measure="busemann", samples=100_000, seed=0))]
    fn growth<'py>(
        &self,
        py: Python<'py>,
        radii: Vec<f64>,
        center: Option<Vec<f64>>,
        measure: &str,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let o = self.center_or_default(center)?;
        let m = parse_measure(measure)?;
        let cfg = McConfig { samples, seed, ..Default::default() };
        let fit = py.detach(|| growth_fit(&self.h, &o, &radii, m, &cfg)).map_err(err)?;
        to_py(py, &fit)
    }

    /// Image in the polyhedrally normed space (log coordinates, summing to zero).
    fn embed(&self, p: Vec<f64>) -> PyResult<Vec<f64>> {
        let e = LogEmbedding::new(&self.h).map_err(err)?;
        Ok(e.embed(&self.point(p)?).map_err(err)?.coords().to_vec())
    }

    /// Lift, section functionals and norm of the isometric embedding.
    fn embedding<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &LogEmbedding::new(&self.h).map_err(err)?.descriptor())
    }

    fn bernig(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(bernig_map(&self.h, &self.point(x)?).map_err(err)?.0)
    }

    fn bernig_inverse(&self, w: Vec<f64>) -> PyResult<Vec<f64>> {
        if w.len() != self.h.dim() {
            return Err(err(GeomError::WrongDimension { expected: self.h.dim(), got: w.len() }));
        }
        Ok(list(&bernig_inverse(&self.h, &DualVector(w)).map_err(err)?))
    }

    #[pyo3(signature = (seed=0, pairs_per_depth=200))]
    fn distortion_report<'py>(&self, py: Python<'py>, seed: u64, pairs_per_depth: usize) -> PyResult<Bound<'py, PyAny>> {
        let cfg = DistortionConfig { seed, pairs_per_depth, ..Default::default() };
        let r = py.detach(|| distortion_report(&self.h, &cfg)).map_err(err)?;
        to_py(py, &r)
    }

    /// `d(x1(t), x2(t)) / (2t)` for unit-speed rays from `center` toward two vertices.
    #[pyo3(signature = (v1, v2, t, center=None))]
    fn ray_divergence_ratio(&self, v1: Vec<f64>, v2: Vec<f64>, t: f64, center: Option<Vec<f64>>) -> PyResult<f64> {
        let o = self.center_or_default(center)?;
        ray_divergence_ratio(&self.h, &o, &self.point(v1)?, &self.point(v2)?, t).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Polytope(dim={}, facets={})", self.h.dim(), self.h.num_facets())
    }
}

fn hrep_from(v: &VRep) -> PyResult<HRep> {
    hilbert_core::polytope::hrep_from_vrep(v).map_err(err)
}

/// Band of `F_a / F_b` over a simplex shared by `a` and `b`.
#[pyfunction]
#[pyo3(signature = (a, b, simplex, seed=0, points_per_depth=100, directions=360))]
fn compare_finsler<'py>(
    py: Python<'py>,
    a: &PyPolytope,
    b: &PyPolytope,
    simplex: &PyPolytope,
    seed: u64,
    points_per_depth: usize,
    directions: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let s = vrep_from_hrep(&simplex.h).map_err(err)?;
    let cfg = ComparisonConfig { seed, points_per_depth, directions, ..Default::default() };
    let c = py.detach(|| finsler_comparison(&a.h, &b.h, &s, &cfg)).map_err(err)?;
    to_py(py, &c)
}

#[pymodule]
fn hilbert_geom(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolytope>()?;
    m.add_function(wrap_pyfunction!(compare_finsler, m)?)?;
    m.add("GeometryError", m.py().get_type::<GeometryError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
