//! Areas in space, on the surface and on τ.
//!
//! Surface patches are measured with a polar finite-element mesh: nodes laid
//! out on τ, lifted vertically onto the surface, and every quad cell counted
//! as two triangles. Exact values from the first fundamental form,
//! `dA = √(1 + r²/4f²)·r dr dφ`, serve as the oracle.

mod mesh;
mod monte_carlo;
mod rect;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::geometry::{ParaboloidModel, Point3};
use crate::projection::ray_scale;
use crate::quadrature::{integrate, FnPath, QuadratureOptions};

pub use mesh::{mapped_mesh_area, polar_mesh_area};
pub use monte_carlo::{MonteCarloEstimate, MonteCarloOptions, DEFAULT_SAMPLES, DEFAULT_SEED};
pub use rect::{
    vertical_rect_projected_area, vertical_rect_surface_area, vertical_rect_surface_mesh, RectImage, VerticalRect,
};

/// Residual bound for closed forms checked against a boundary integral.
pub const PROJECTED_AREA_BOUND: f64 = 1e-6;
/// Residual bound for mesh areas against the closed-form patch area.
pub const MESH_AREA_BOUND: f64 = 1e-3;
/// Residual bound for areas that are exact products.
pub const EXACT_AREA_BOUND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    pub rows: usize,
    pub cols: usize,
    pub refine_tol: f64,
    pub max_refines: u32,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self { rows: 64, cols: 64, refine_tol: 1e-4, max_refines: 6 }
    }
}

impl MeshSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(GeometryError::InvalidArgument(format!(
                "mesh needs at least 2x2 nodes, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(GeometryError::InvalidArgument("refine_tol must be > 0".into()));
        }
        Ok(())
    }

    /// Spec with twice as many cells in each direction; nodes stay nested.
    pub fn doubled(&self) -> Self {
        Self { rows: 2 * self.rows - 1, cols: 2 * self.cols - 1, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaResult {
    #[serde(rename = "analytic_or_mesh")]
    pub value: f64,
    pub oracle: f64,
    pub rel_residual: f64,
    pub bound: f64,
    /// Standard error of a Monte-Carlo oracle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    /// Final mesh resolution, for mesh values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<[usize; 2]>,
}

impl AreaResult {
    pub fn new(value: f64, oracle: f64, bound: f64) -> Self {
        let rel_residual = if value == oracle { 0.0 } else { (value - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE) };
        Self { value, oracle, rel_residual, bound, std_error: None, mesh: None }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, EXACT_AREA_BOUND)
    }

    pub fn within_bound(&self) -> bool {
        self.rel_residual <= self.bound
    }
}

fn check_span(dphi: f64) -> Result<()> {
    if !(0.0..=2.0 * PI * (1.0 + 1e-12)).contains(&dphi) {
        return Err(GeometryError::InvalidArgument(format!("angular span must lie in [0, 2pi], got {dphi}")));
    }
    Ok(())
}

/// Portion of the vertical cylinder of radius `r` between two heights.
pub fn cylindrical_patch_area(r: f64, w_top: f64, w_bottom: f64, dphi: f64) -> Result<f64> {
    if !(r > 0.0) || w_top < w_bottom {
        return Err(GeometryError::InvalidArgument(format!(
            "need r > 0 and w_top >= w_bottom, got r = {r}, w_top = {w_top}, w_bottom = {w_bottom}"
        )));
    }
    check_span(dphi)?;
    Ok((w_top - w_bottom) * r * dphi)
}

/// `½(r_outer² − r_inner²)·dphi`.
pub fn annular_sector_area(r_outer: f64, r_inner: f64, dphi: f64) -> Result<f64> {
    if !(r_outer >= r_inner && r_inner >= 0.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "need r_outer >= r_inner >= 0, got {r_outer}, {r_inner}"
        )));
    }
    check_span(dphi)?;
    Ok(0.5 * (r_outer - r_inner) * (r_outer + r_inner) * dphi)
}

/// Area of the quad `p1 p2 p3 p4` as the triangles `(p3; p4, p2)` and
/// `(p1; p4, p2)` sharing the diagonal `p2 p4`.
pub fn quad_patch_area(p1: Point3, p2: Point3, p3: Point3, p4: Point3) -> f64 {
    let tri = |apex: Point3| (p4 - apex).to_vector().cross(&(p2 - apex).to_vector()).norm();
    0.5 * (tri(p3) + tri(p1))
}

/// Exact area of the surface above the annular sector `r_inner ≤ r ≤ r_outer`.
pub fn paraboloid_patch_area_closed(model: &ParaboloidModel, r_inner: f64, r_outer: f64, dphi: f64) -> Result<f64> {
    if !(r_outer >= r_inner && r_inner >= 0.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "need r_outer >= r_inner >= 0, got {r_outer}, {r_inner}"
        )));
    }
    check_span(dphi)?;
    let four_f2 = 4.0 * model.f() * model.f();
    let (x, y) = (1.0 + r_outer * r_outer / four_f2, 1.0 + r_inner * r_inner / four_f2);
    // x^{3/2} − y^{3/2} = (x − y)(x² + xy + y²)/(x^{3/2} + y^{3/2}), stable for flat patches
    let diff = (r_outer - r_inner) * (r_outer + r_inner) / four_f2;
    let cube_diff = diff * (x * x + x * y + y * y) / (x.powf(1.5) + y.powf(1.5));
    Ok(dphi * four_f2 / 3.0 * cube_diff)
}

/// Runs `eval` on `spec` and on successively doubled meshes until two
/// consecutive totals agree to `refine_tol`.
pub(crate) fn refine<F: Fn(usize, usize) -> f64>(spec: &MeshSpec, eval: F) -> Result<(f64, [usize; 2])> {
    spec.validate()?;
    let mut current = *spec;
    let mut prev = eval(current.rows, current.cols);
    for _ in 0..spec.max_refines {
        let next = current.doubled();
        let value = eval(next.rows, next.cols);
        let change = (value - prev).abs();
        current = next;
        prev = value;
        if change <= spec.refine_tol * value.abs() {
            return Ok((value, [current.rows, current.cols]));
        }
    }
    if spec.max_refines == 0 {
        return Ok((prev, [current.rows, current.cols]));
    }
    Err(GeometryError::NoConvergence(format!(
        "mesh did not settle to {} after {} refinements ({}x{})",
        spec.refine_tol, spec.max_refines, current.rows, current.cols
    )))
}

/// Surface area above the annular sector `[r_inner, r_outer] × [phi_b, phi_a]`
/// by mesh refinement, against the closed form.
pub fn paraboloid_mesh_area(
    model: &ParaboloidModel,
    r_inner: f64,
    r_outer: f64,
    phi_b: f64,
    phi_a: f64,
    spec: &MeshSpec,
) -> Result<AreaResult> {
    let dphi = phi_a - phi_b;
    if !(r_outer >= r_inner && r_inner >= 0.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "need r_outer >= r_inner >= 0, got {r_outer}, {r_inner}"
        )));
    }
    check_span(dphi)?;
    spec.validate()?;
    let oracle = paraboloid_patch_area_closed(model, r_inner, r_outer, dphi)?;
    if r_outer == r_inner || dphi == 0.0 {
        return Ok(AreaResult::new(0.0, oracle, MESH_AREA_BOUND));
    }
    let (value, mesh) = refine(spec, |rows, cols| polar_mesh_area(model, r_inner, r_outer, phi_b, phi_a, rows, cols))?;
    Ok(AreaResult { mesh: Some(mesh), ..AreaResult::new(value, oracle, MESH_AREA_BOUND) })
}

/// Signed area enclosed by closed boundary pieces, `½∮(x dy − y dx)` over the
/// horizontal components. Each piece is parametrised over `[0, 1]`.
pub(crate) fn boundary_area(pieces: &[&dyn crate::quadrature::ParametricPath], opts: QuadratureOptions) -> Result<f64> {
    let mut total = crate::quadrature::NeumaierSum::default();
    for piece in pieces {
        let v = integrate(
            |s| {
                let (p, d) = (piece.point(s), piece.velocity(s));
                0.5 * (p.u * d.v - p.v * d.u)
            },
            0.0,
            1.0,
            opts,
        )?;
        total.add(v);
    }
    Ok(total.total())
}

/// A horizontal circular arc of radius `r` about the axis, at height `w`,
/// swept over `[phi0, phi0 + dphi]` (reversed when `reverse`).
fn axis_arc(r: f64, w: f64, phi0: f64, dphi: f64, reverse: bool) -> FnPath<impl Fn(f64) -> Point3, impl Fn(f64) -> Point3> {
    let angle = move |s: f64| if reverse { phi0 + dphi * (1.0 - s) } else { phi0 + dphi * s };
    let rate = if reverse { -dphi } else { dphi };
    FnPath {
        point: move |s: f64| {
            let (sn, cs) = angle(s).sin_cos();
            Point3::new(r * cs, r * sn, w)
        },
        velocity: move |s: f64| {
            let (sn, cs) = angle(s).sin_cos();
            Point3::new(-r * sn * rate, r * cs * rate, 0.0)
        },
    }
}

/// Straight piece from `a` to `b`.
fn straight(a: Point3, b: Point3) -> FnPath<impl Fn(f64) -> Point3, impl Fn(f64) -> Point3> {
    FnPath { point: move |s: f64| a + (b - a) * s, velocity: move |_| b - a }
}

/// Boundary integral of the annular sector; the oracle for its area.
fn annular_sector_boundary_area(r_inner: f64, r_outer: f64, phi0: f64, dphi: f64, opts: QuadratureOptions) -> Result<f64> {
    let (s0, c0) = phi0.sin_cos();
    let (s1, c1) = (phi0 + dphi).sin_cos();
    let outer = axis_arc(r_outer, 0.0, phi0, dphi, false);
    let down = straight(Point3::new(r_outer * c1, r_outer * s1, 0.0), Point3::new(r_inner * c1, r_inner * s1, 0.0));
    let inner = axis_arc(r_inner, 0.0, phi0, dphi, true);
    let up = straight(Point3::new(r_inner * c0, r_inner * s0, 0.0), Point3::new(r_outer * c0, r_outer * s0, 0.0));
    Ok(boundary_area(&[&outer, &down, &inner, &up], opts)?.abs())
}

/// A portion of a vertical cylinder about the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylindricalPatch {
    pub r: f64,
    pub w_top: f64,
    pub w_bottom: f64,
    pub phi_from: f64,
    pub phi_to: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylindricalPatchAreas {
    /// The patch itself.
    pub space: AreaResult,
    /// Orthogonal projection of its perspective on τ: an annular sector.
    pub projected: AreaResult,
    /// Its perspective on the surface.
    pub surface: AreaResult,
    /// Radii of the projected images of the top and bottom arcs.
    pub image_radii: [f64; 2],
}

impl CylindricalPatch {
    pub fn validate(&self) -> Result<()> {
        cylindrical_patch_area(self.r, self.w_top, self.w_bottom, self.phi_to - self.phi_from).map(|_| ())
    }

    pub fn areas(&self, model: &ParaboloidModel, spec: &MeshSpec) -> Result<CylindricalPatchAreas> {
        let dphi = self.phi_to - self.phi_from;
        let space = cylindrical_patch_area(self.r, self.w_top, self.w_bottom, dphi)?;
        let height = self.w_top - self.w_bottom;
        let space_oracle = integrate(|_| self.r * height, 0.0, dphi, QuadratureOptions::for_scale(model.f()))?;

        // every point of a horizontal circle about the axis shares one ray scale
        let image_r = |w: f64| self.r * ray_scale(model.f(), Point3::new(self.r, 0.0, w));
        let (r_top, r_bottom) = (image_r(self.w_top), image_r(self.w_bottom));
        let projected = annular_sector_area(r_top, r_bottom, dphi)?;
        let projected_oracle = self.image_boundary_area(model)?;

        let surface = paraboloid_mesh_area(model, r_bottom, r_top, self.phi_from, self.phi_to, spec)?;
        Ok(CylindricalPatchAreas {
            space: AreaResult::new(space, space_oracle, EXACT_AREA_BOUND),
            projected: AreaResult::new(projected, projected_oracle, PROJECTED_AREA_BOUND),
            surface,
            image_radii: [r_top, r_bottom],
        })
    }

    /// Boundary integral around the τ-projection of the perspective, traced by
    /// projecting the patch's own edges point by point.
    fn image_boundary_area(&self, model: &ParaboloidModel) -> Result<f64> {
        let f = model.f();
        let dphi = self.phi_to - self.phi_from;
        let project = move |p: Point3| {
            let q = p * ray_scale(f, p);
            Point3::new(q.u, q.v, 0.0)
        };
        let top = axis_arc(self.r, self.w_top, self.phi_from, dphi, false);
        let bottom = axis_arc(self.r, self.w_bottom, self.phi_from, dphi, true);
        let top_img = Traced(|s: f64| project((top.point)(s)));
        let bottom_img = Traced(|s: f64| project((bottom.point)(s)));
        let (s1, c1) = self.phi_to.sin_cos();
        let (s0, c0) = self.phi_from.sin_cos();
        let down = straight(
            project(Point3::new(self.r * c1, self.r * s1, self.w_top)),
            project(Point3::new(self.r * c1, self.r * s1, self.w_bottom)),
        );
        let up = straight(
            project(Point3::new(self.r * c0, self.r * s0, self.w_bottom)),
            project(Point3::new(self.r * c0, self.r * s0, self.w_top)),
        );
        Ok(boundary_area(&[&top_img, &down, &bottom_img, &up], QuadratureOptions::for_scale(f))?.abs())
    }
}

/// A path known only by its points; velocity by finite differences.
struct Traced<F>(F);

impl<F: Fn(f64) -> Point3> crate::quadrature::ParametricPath for Traced<F> {
    fn point(&self, t: f64) -> Point3 {
        (self.0)(t)
    }
}

/// An annular sector of τ about the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularSector {
    pub r_inner: f64,
    pub r_outer: f64,
    pub phi_from: f64,
    pub phi_to: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularSectorAreas {
    /// The sector on τ.
    pub projected: AreaResult,
    /// The surface patch above it.
    pub surface: AreaResult,
}

impl AnnularSector {
    pub fn validate(&self) -> Result<()> {
        annular_sector_area(self.r_outer, self.r_inner, self.phi_to - self.phi_from).map(|_| ())
    }

    pub fn areas(&self, model: &ParaboloidModel, spec: &MeshSpec) -> Result<AnnularSectorAreas> {
        let dphi = self.phi_to - self.phi_from;
        let projected = annular_sector_area(self.r_outer, self.r_inner, dphi)?;
        let oracle =
            annular_sector_boundary_area(self.r_inner, self.r_outer, self.phi_from, dphi, QuadratureOptions::for_scale(model.f()))?;
        Ok(AnnularSectorAreas {
            projected: AreaResult::new(projected, oracle, PROJECTED_AREA_BOUND),
            surface: paraboloid_mesh_area(model, self.r_inner, self.r_outer, self.phi_from, self.phi_to, spec)?,
        })
    }
}
