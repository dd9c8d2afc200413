//! Python bindings for `paraboloid-core`.
//!
//! Points are plain tuples, `(u, v, w)` in space and `(u, v)` on τ. Structured
//! results come back as dicts with the same keys as the JSON report.

use paraboloid_core::area::{self, MeshSpec, MonteCarloOptions, VerticalRect};
use paraboloid_core::length::{self, LengthOptions};
use paraboloid_core::report::{build_report, emit_report, Command, Format, RunSettings};
use paraboloid_core::{FocalPlane, GeometryError, ParaboloidModel, Point2, Point3};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

type Xyz = (f64, f64, f64);

fn err(e: GeometryError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn p3((u, v, w): Xyz) -> Point3 {
    Point3::new(u, v, w)
}

fn xyz(p: Point3) -> Xyz {
    (p.u, p.v, p.w)
}

/// Converts any serializable result into Python objects via JSON.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn mesh_spec(rows: usize, cols: usize, refine_tol: f64, max_refines: u32) -> MeshSpec {
    MeshSpec { rows, cols, refine_tol, max_refines }
}

fn rect(a: Xyz, b: Xyz, c: Xyz, d: Xyz) -> PyResult<VerticalRect> {
    VerticalRect::new(p3(a), p3(b), p3(c), p3(d)).map_err(err)
}

/// The surface `u² + v² = 4f·w + 4f²` with its tolerance policy.
#[pyclass(name = "ParaboloidModel", frozen, module = "paraboloid")]
struct PyModel {
    inner: ParaboloidModel,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (f, tol_rel=None, tol_abs=None))]
    fn new(f: f64, tol_rel: Option<f64>, tol_abs: Option<f64>) -> PyResult<Self> {
        let inner = match (tol_rel, tol_abs) {
            (None, None) => ParaboloidModel::new(f),
            _ => {
                let d = ParaboloidModel::new(f).map_err(err)?;
                ParaboloidModel::with_tolerances(f, tol_rel.unwrap_or(d.tol_rel()), tol_abs.unwrap_or(d.tol_abs()))
            }
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn f(&self) -> f64 {
        self.inner.f()
    }

    #[getter]
    fn tol_rel(&self) -> f64 {
        self.inner.tol_rel()
    }

    #[getter]
    fn tol_abs(&self) -> f64 {
        self.inner.tol_abs()
    }

    fn __repr__(&self) -> String {
        format!("ParaboloidModel(f={}, tol_rel={}, tol_abs={})", self.inner.f(), self.inner.tol_rel(), self.inner.tol_abs())
    }

    fn surface_w(&self, u: f64, v: f64) -> f64 {
        self.inner.surface_w(u, v)
    }

    fn on_surface(&self, p: Xyz) -> bool {
        self.inner.on_surface(p3(p))
    }

    fn central_project(&self, p: Xyz) -> PyResult<Xyz> {
        self.inner.central_project(p3(p)).map(xyz).map_err(err)
    }

    fn second_perspective(&self, p: (f64, f64)) -> PyResult<Xyz> {
        self.inner.second_perspective(Point2::new(p.0, p.1)).map(xyz).map_err(err)
    }

    /// All five images of a point, as a dict.
    fn double_project<'py>(&self, py: Python<'py>, p: Xyz) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.double_project(p3(p)).map_err(err)?)
    }

    /// Unit normal `(l, m, n)` of the plane through the focus and `a`, `b`.
    fn plane_through_focus(&self, a: Xyz, b: Xyz) -> PyResult<Xyz> {
        let plane = self.inner.plane_through_focus(p3(a), p3(b)).map_err(err)?;
        Ok((plane.l, plane.m, plane.n))
    }

    /// Kind and parameters of the section of the surface by a plane through
    /// the focus with normal `(l, m, n)`.
    fn classify_section<'py>(&self, py: Python<'py>, normal: Xyz) -> PyResult<Bound<'py, PyAny>> {
        let plane = FocalPlane::new(normal.0, normal.1, normal.2).map_err(err)?;
        let section = self.inner.classify_section(plane);
        let out = PyDict::new(py);
        out.set_item("kind", to_py(py, &section.kind())?)?;
        out.set_item("normal", (plane.l, plane.m, plane.n))?;
        if section.projected_radius.is_finite() {
            out.set_item("projected_center", (section.projected_center.u, section.projected_center.v))?;
            out.set_item("projected_radius", section.projected_radius)?;
        }
        if let Some(e) = section.ellipse() {
            out.set_item("center", xyz(e.center))?;
            out.set_item("a", e.a)?;
            out.set_item("b", e.b)?;
            out.set_item("phi_oe", e.phi_oe)?;
        }
        if let paraboloid_core::SectionShape::Parabola { phi } = section.shape {
            out.set_item("phi", phi)?;
        }
        Ok(out.into_any())
    }

    /// Lengths of segment `ab` and its images, each with its oracle.
    fn line_image_lengths<'py>(&self, py: Python<'py>, a: Xyz, b: Xyz) -> PyResult<Bound<'py, PyAny>> {
        let r = length::line_image_lengths(&self.inner, p3(a), p3(b), &LengthOptions::for_model(&self.inner))
            .map_err(err)?;
        to_py(py, &r)
    }

    fn paraboloid_patch_area_closed(&self, r_inner: f64, r_outer: f64, dphi: f64) -> PyResult<f64> {
        area::paraboloid_patch_area_closed(&self.inner, r_inner, r_outer, dphi).map_err(err)
    }

    #[pyo3(signature = (r_inner, r_outer, phi_b, phi_a, rows=64, cols=64, refine_tol=1e-4, max_refines=6))]
    #[allow(clippy::too_many_arguments)]
    fn paraboloid_mesh_area<'py>(
        &self,
        py: Python<'py>,
        r_inner: f64,
        r_outer: f64,
        phi_b: f64,
        phi_a: f64,
        rows: usize,
        cols: usize,
        refine_tol: f64,
        max_refines: u32,
    ) -> PyResult<Bound<'py, PyAny>> {
        let spec = mesh_spec(rows, cols, refine_tol, max_refines);
        let r = py
            .detach(|| area::paraboloid_mesh_area(&self.inner, r_inner, r_outer, phi_b, phi_a, &spec))
            .map_err(err)?;
        to_py(py, &r)
    }

    /// Area of the τ-region under the perspective of the vertical rectangle
    /// `abcd` (`a` above `d`, `b` above `c`).
    fn vertical_rect_projected_area<'py>(&self, py: Python<'py>, a: Xyz, b: Xyz, c: Xyz, d: Xyz) -> PyResult<Bound<'py, PyAny>> {
        let r = area::vertical_rect_projected_area(&self.inner, &rect(a, b, c, d)?).map_err(err)?;
        to_py(py, &r)
    }

    #[pyo3(signature = (a, b, c, d, rows=64, cols=64, refine_tol=1e-4, max_refines=6, samples=10_000_000, seed=None))]
    #[allow(clippy::too_many_arguments)]
    fn vertical_rect_surface_area<'py>(
        &self,
        py: Python<'py>,
        a: Xyz,
        b: Xyz,
        c: Xyz,
        d: Xyz,
        rows: usize,
        cols: usize,
        refine_tol: f64,
        max_refines: u32,
        samples: u64,
        seed: Option<u64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let rect = rect(a, b, c, d)?;
        let spec = mesh_spec(rows, cols, refine_tol, max_refines);
        let mc = MonteCarloOptions { samples, seed: seed.unwrap_or(area::DEFAULT_SEED) };
        let r = py.detach(|| area::vertical_rect_surface_area(&self.inner, &rect, &spec, &mc)).map_err(err)?;
        to_py(py, &r)
    }
}

#[pyfunction]
fn space_length(a: Xyz, b: Xyz) -> f64 {
    length::space_length(p3(a), p3(b))
}

/// Chord-ratio approximation of an elliptic arc between eccentric anomalies.
#[pyfunction]
fn elliptic_arc_approx(a: f64, b: f64, t1: f64, t2: f64) -> PyResult<f64> {
    length::elliptic_arc_approx(a, b, t1, t2).map_err(err)
}

#[pyfunction]
fn annular_sector_area(r_outer: f64, r_inner: f64, dphi: f64) -> PyResult<f64> {
    area::annular_sector_area(r_outer, r_inner, dphi).map_err(err)
}

#[pyfunction]
fn cylindrical_patch_area(r: f64, w_top: f64, w_bottom: f64, dphi: f64) -> PyResult<f64> {
    area::cylindrical_patch_area(r, w_top, w_bottom, dphi).map_err(err)
}

/// Runs a command (`project`, `classify`, `length`, `area` or `validate`)
/// over a scene document and returns the report text.
#[pyfunction]
#[pyo3(signature = (scene, command, format="json", samples=10_000_000, seed=None))]
fn run_scene(py: Python<'_>, scene: &str, command: &str, format: &str, samples: u64, seed: Option<u64>) -> PyResult<String> {
    let scene = paraboloid_core::parse_scene(scene).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let command = match command {
        "project" => Command::Project,
        "classify" => Command::Classify,
        "length" => Command::Length,
        "area" => Command::Area,
        "validate" => Command::Validate,
        other => return Err(PyValueError::new_err(format!("unknown command '{other}'"))),
    };
    let format = match format {
        "json" => Format::Json,
        "csv" => Format::Csv,
        other => return Err(PyValueError::new_err(format!("unknown format '{other}'"))),
    };
    let settings = RunSettings {
        monte_carlo: MonteCarloOptions { samples, seed: seed.unwrap_or(area::DEFAULT_SEED) },
        ..RunSettings::default()
    };
    Ok(py.detach(|| emit_report(&build_report(&scene, command, &settings), format)))
}

#[pymodule]
fn paraboloid(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(space_length, m)?)?;
    m.add_function(wrap_pyfunction!(elliptic_arc_approx, m)?)?;
    m.add_function(wrap_pyfunction!(annular_sector_area, m)?)?;
    m.add_function(wrap_pyfunction!(cylindrical_patch_area, m)?)?;
    m.add_function(wrap_pyfunction!(run_scene, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
