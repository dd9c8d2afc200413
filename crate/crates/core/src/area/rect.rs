//! Vertical rectangles: the τ-region under their perspective and the area
//! of the perspective itself.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::monte_carlo::{integrate_box, MonteCarloOptions};
use super::{boundary_area, mapped_mesh_area, refine, AreaResult, MeshSpec, PROJECTED_AREA_BOUND};
use crate::conics::ccw_span;
use crate::error::{GeometryError, Result};
use crate::geometry::{ParaboloidModel, Point2, Point3};
use crate::projection::{ray_scale, ray_scale_derivative};
use crate::quadrature::{FnPath, ParametricPath, QuadratureOptions};

/// A rectangle in a vertical plane: `a` above `d`, `b` above `c`, with `ab`
/// the top edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalRect {
    pub a: Point3,
    pub b: Point3,
    pub c: Point3,
    pub d: Point3,
}

impl VerticalRect {
    pub fn new(a: Point3, b: Point3, c: Point3, d: Point3) -> Result<Self> {
        let rect = Self { a, b, c, d };
        rect.validate()?;
        Ok(rect)
    }

    fn tolerance(&self) -> f64 {
        let scale = [self.a, self.b, self.c, self.d].iter().map(|p| p.norm()).fold(1.0, f64::max);
        1e-9 * scale
    }

    pub fn validate(&self) -> Result<()> {
        let tol = self.tolerance();
        if ![self.a, self.b, self.c, self.d].iter().all(Point3::is_finite) {
            return Err(GeometryError::InvalidArgument("corner coordinates must be finite".into()));
        }
        if self.a.horizontal().distance(self.d.horizontal()) > tol || self.b.horizontal().distance(self.c.horizontal()) > tol {
            return Err(GeometryError::InvalidArgument("edges ad and bc must be vertical".into()));
        }
        if (self.a.w - self.b.w).abs() > tol || (self.c.w - self.d.w).abs() > tol {
            return Err(GeometryError::InvalidArgument("edges ab and dc must be horizontal".into()));
        }
        if self.a.w - self.d.w <= tol {
            return Err(GeometryError::RegionInverted(format!(
                "top edge at w = {} is not above bottom edge at w = {}",
                self.a.w, self.d.w
            )));
        }
        Ok(())
    }

    /// The same rectangle turned about the axis by `phi`.
    pub fn rotated(&self, phi: f64) -> Self {
        Self {
            a: self.a.rotate_about_w(phi),
            b: self.b.rotate_about_w(phi),
            c: self.c.rotate_about_w(phi),
            d: self.d.rotate_about_w(phi),
        }
    }

    fn is_degenerate(&self) -> bool {
        let tol = self.tolerance();
        let (a, b) = (self.a.horizontal(), self.b.horizontal());
        // zero width, or a width seen edge-on from the axis
        a.distance(b) <= tol || ((a.u * b.v - a.v * b.u).abs() <= tol * (a.r() + b.r()) && a.u * b.u + a.v * b.v > 0.0)
    }

    /// Boundary data of the τ-region bounded by the images of the four edges.
    pub fn image(&self, model: &ParaboloidModel) -> Result<RectImage> {
        let top = edge_circle(model, self.a, self.b)?;
        let bottom = edge_circle(model, self.d, self.c)?;
        let proj = |p: Point3| Ok::<_, GeometryError>(model.central_project(p)?.horizontal());
        Ok(RectImage {
            a1: proj(self.a)?,
            b1: proj(self.b)?,
            c1: proj(self.c)?,
            d1: proj(self.d)?,
            outer_center: top.0,
            outer_radius: top.1,
            inner_center: bottom.0,
            inner_radius: bottom.1,
        })
    }
}

/// Projected circle carrying the image of a horizontal edge.
fn edge_circle(model: &ParaboloidModel, p: Point3, q: Point3) -> Result<(Point2, f64)> {
    let (ph, qh) = (p.horizontal(), q.horizontal());
    let d = Point2::new(qh.u - ph.u, qh.v - ph.v);
    let d2 = d.u * d.u + d.v * d.v;
    let s = if d2 > 0.0 { (-(ph.u * d.u + ph.v * d.v) / d2).clamp(0.0, 1.0) } else { 0.0 };
    let closest = Point2::new(ph.u + s * d.u, ph.v + s * d.v).r();
    if closest <= model.tol_abs() + model.tol_rel() * p.norm().max(q.norm()) {
        return Err(GeometryError::DegenerateOnAxis { r: closest });
    }
    let section = model.classify_section(model.plane_through_focus(p, q)?);
    if !section.projected_radius.is_finite() {
        return Err(GeometryError::NotElliptic { n_abs: section.plane.n.abs() });
    }
    Ok((section.projected_center, section.projected_radius))
}

/// Corners and circles of the τ-region under a vertical rectangle's
/// perspective. The region lies between the radial lines through the
/// corners, outside the inner arc and inside the outer arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectImage {
    pub a1: Point2,
    pub b1: Point2,
    pub c1: Point2,
    pub d1: Point2,
    pub outer_center: Point2,
    pub outer_radius: f64,
    pub inner_center: Point2,
    pub inner_radius: f64,
}

/// Arc of a circle, stored counter-clockwise from `start` over `sweep`.
#[derive(Debug, Clone, Copy)]
struct Arc {
    center: Point2,
    radius: f64,
    start: f64,
    sweep: f64,
}

impl Arc {
    fn through(center: Point2, radius: f64, from: Point2, to: Point2, via: Point2) -> Self {
        let angle = |p: Point2| (p.v - center.v).atan2(p.u - center.u);
        let (t0, t1, tm) = (angle(from), angle(to), angle(via));
        let span = ccw_span(t0, t1);
        if ccw_span(t0, tm) <= span {
            Self { center, radius, start: t0, sweep: span }
        } else {
            Self { center, radius, start: t1, sweep: 2.0 * PI - span }
        }
    }

    fn contains(&self, theta: f64) -> bool {
        ccw_span(self.start, theta) <= self.sweep
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Line(Point2, Point2),
    Arc(Arc),
}

/// A piece of boundary crossing a vertical line, as a graph over a slab.
#[derive(Debug, Clone, Copy)]
enum Branch {
    Line { p: Point2, slope: f64 },
    Circle { center: Point2, radius: f64, sign: f64 },
}

impl Branch {
    /// `∫ y(x) dx` over `[x0, x1]`.
    fn integral(&self, x0: f64, x1: f64) -> f64 {
        match *self {
            Branch::Line { p, slope } => (x1 - x0) * (p.v + slope * (0.5 * (x0 + x1) - p.u)),
            Branch::Circle { center, radius, sign } => {
                let g = |x: f64| {
                    let t = x - center.u;
                    let ratio = (t / radius).clamp(-1.0, 1.0);
                    let h = (radius * radius - t * t).max(0.0).sqrt();
                    0.5 * (t * h + radius * radius * ratio.asin())
                };
                center.v * (x1 - x0) + sign * (g(x1) - g(x0))
            }
        }
    }
}

/// Area enclosed by `pieces` from vertical slabs between consecutive
/// breakpoints; inside each slab the pieces are graphs in a fixed order.
fn slab_area(pieces: &[Piece]) -> f64 {
    let mut xs: Vec<f64> = Vec::new();
    for piece in pieces {
        match *piece {
            Piece::Line(p, q) => xs.extend([p.u, q.u]),
            Piece::Arc(arc) => {
                if arc.contains(0.0) {
                    xs.push(arc.center.u + arc.radius);
                }
                if arc.contains(PI) {
                    xs.push(arc.center.u - arc.radius);
                }
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut total = crate::quadrature::NeumaierSum::default();
    let mut crossings: Vec<(f64, Branch)> = Vec::new();
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let xm = 0.5 * (x0 + x1);
        if !(xm > x0 && xm < x1) {
            continue;
        }
        crossings.clear();
        for piece in pieces {
            match *piece {
                Piece::Line(p, q) => {
                    if (xm - p.u) * (xm - q.u) < 0.0 {
                        let slope = (q.v - p.v) / (q.u - p.u);
                        crossings.push((p.v + slope * (xm - p.u), Branch::Line { p, slope }));
                    }
                }
                Piece::Arc(arc) => {
                    let t = xm - arc.center.u;
                    if t.abs() < arc.radius {
                        let h = (arc.radius * arc.radius - t * t).sqrt();
                        for sign in [1.0, -1.0] {
                            if arc.contains((sign * h).atan2(t)) {
                                let branch = Branch::Circle { center: arc.center, radius: arc.radius, sign };
                                crossings.push((arc.center.v + sign * h, branch));
                            }
                        }
                    }
                }
            }
        }
        crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in crossings.chunks_exact(2) {
            total.add(pair[1].1.integral(x0, x1) - pair[0].1.integral(x0, x1));
        }
    }
    total.total()
}

/// τ-image of the segment `p → q`, traced point by point.
fn image_path(f: f64, p: Point3, q: Point3) -> FnPath<impl Fn(f64) -> Point3, impl Fn(f64) -> Point3> {
    let d = q - p;
    FnPath {
        point: move |s: f64| {
            let x = p + d * s;
            let y = x * ray_scale(f, x);
            Point3::new(y.u, y.v, 0.0)
        },
        velocity: move |s: f64| {
            let x = p + d * s;
            let v = x * ray_scale_derivative(f, x, d) + d * ray_scale(f, x);
            Point3::new(v.u, v.v, 0.0)
        },
    }
}

fn lift(p: Point2) -> Point3 {
    Point3::new(p.u, p.v, 0.0)
}

fn straight(a: Point2, b: Point2) -> FnPath<impl Fn(f64) -> Point3, impl Fn(f64) -> Point3> {
    let (a, b) = (lift(a), lift(b));
    FnPath { point: move |s: f64| a + (b - a) * s, velocity: move |_| b - a }
}

/// Area of the τ-region under the perspective of `rect`, in closed form,
/// against a boundary integral around the traced images of its edges.
pub fn vertical_rect_projected_area(model: &ParaboloidModel, rect: &VerticalRect) -> Result<AreaResult> {
    rect.validate()?;
    if rect.is_degenerate() {
        return Ok(AreaResult::new(0.0, 0.0, PROJECTED_AREA_BOUND));
    }
    let img = rect.image(model)?;
    let f = model.f();
    let mid = |p: Point3, q: Point3| {
        let m = p + (q - p) * 0.5;
        (m * ray_scale(f, m)).horizontal()
    };
    let outer = Arc::through(img.outer_center, img.outer_radius, img.a1, img.b1, mid(rect.a, rect.b));
    let inner = Arc::through(img.inner_center, img.inner_radius, img.c1, img.d1, mid(rect.c, rect.d));
    let analytic = slab_area(&[Piece::Arc(outer), Piece::Line(img.b1, img.c1), Piece::Arc(inner), Piece::Line(img.d1, img.a1)]);

    let top = image_path(f, rect.a, rect.b);
    let right = straight(img.b1, img.c1);
    let bottom = image_path(f, rect.c, rect.d);
    let left = straight(img.d1, img.a1);
    let oracle = boundary_area(&[&top, &right, &bottom, &left], QuadratureOptions::for_scale(f))?.abs();
    Ok(AreaResult::new(analytic, oracle, PROJECTED_AREA_BOUND))
}

/// Radius where the ray from the origin at angle `theta` leaves the
/// projected circle `(c, R)`. These circles always satisfy
/// `R² − |c|² = 4f²`, so the origin is inside.
fn exit_radius(f: f64, c: Point2, theta: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    let ec = co * c.u + s * c.v;
    let root = (ec * ec + 4.0 * f * f).sqrt();
    if ec >= 0.0 {
        ec + root
    } else {
        4.0 * f * f / (root - ec)
    }
}

/// Angular window `[theta0, theta0 + span]` of the region, seen from the
/// origin.
fn angular_window(img: &RectImage) -> (f64, f64) {
    let (ta, tb) = (img.a1.v.atan2(img.a1.u), img.b1.v.atan2(img.b1.u));
    let mut sweep = (tb - ta).rem_euclid(2.0 * PI);
    if sweep > PI {
        sweep -= 2.0 * PI;
    }
    if sweep >= 0.0 {
        (ta, sweep)
    } else {
        (tb, -sweep)
    }
}

/// Mesh area of the perspective of `rect`: the surface over an enclosing
/// annular sector, less the two curved strips outside the region.
pub fn vertical_rect_surface_mesh(model: &ParaboloidModel, rect: &VerticalRect, spec: &MeshSpec) -> Result<(f64, [usize; 2])> {
    rect.validate()?;
    spec.validate()?;
    if rect.is_degenerate() {
        return Ok((0.0, [spec.rows, spec.cols]));
    }
    let img = rect.image(model)?;
    let f = model.f();
    let (theta0, span) = angular_window(&img);
    let theta1 = theta0 + span;
    let rho_out = |t: f64| exit_radius(f, img.outer_center, t);
    let rho_in = |t: f64| exit_radius(f, img.inner_center, t);

    let in_window = |t: f64| ccw_span(theta0, t) <= span;
    let extreme = |c: Point2, toward: bool| {
        let tc = c.v.atan2(c.u) + if toward { 0.0 } else { PI };
        let mut vals = vec![exit_radius(f, c, theta0), exit_radius(f, c, theta1)];
        if in_window(tc) {
            vals.push(exit_radius(f, c, tc));
        }
        vals
    };
    let r_hi = extreme(img.outer_center, true).into_iter().fold(f64::MIN, f64::max);
    let r_lo = extreme(img.inner_center, false).into_iter().fold(f64::MAX, f64::min);

    refine(spec, |rows, cols| {
        let total = mapped_mesh_area(model, theta0, theta1, |_| r_lo, |_| r_hi, rows, cols);
        let beyond = mapped_mesh_area(model, theta0, theta1, rho_out, |_| r_hi, rows, cols);
        let within = mapped_mesh_area(model, theta0, theta1, |_| r_lo, rho_in, rows, cols);
        total - beyond - within
    })
}

/// Surface area of the perspective of `rect`, with a Monte-Carlo oracle:
/// points of τ are sampled over a box around the region, kept when the ray
/// through their lift hits the rectangle, and weighted by the area element.
/// The bound is three standard errors.
pub fn vertical_rect_surface_area(
    model: &ParaboloidModel,
    rect: &VerticalRect,
    spec: &MeshSpec,
    mc: &MonteCarloOptions,
) -> Result<AreaResult> {
    let (value, mesh) = vertical_rect_surface_mesh(model, rect, spec)?;
    if value == 0.0 {
        return Ok(AreaResult { mesh: Some(mesh), ..AreaResult::new(0.0, 0.0, PROJECTED_AREA_BOUND) });
    }
    let f = model.f();
    let bounds = sample_bounds(f, rect);
    let (a, ab, ad) = (rect.a.to_vector(), (rect.b - rect.a).to_vector(), (rect.d - rect.a).to_vector());
    let normal = ab.cross(&ad);
    let (ab2, ad2) = (ab.norm_squared(), ad.norm_squared());
    let inv_4f2 = 1.0 / (4.0 * f * f);
    let hits = |u: f64, v: f64| {
        let r2 = u * u + v * v;
        let s = nalgebra::Vector3::new(u, v, (r2 - 4.0 * f * f) / (4.0 * f));
        let denom = normal.dot(&s);
        if denom == 0.0 {
            return 0.0;
        }
        let lambda = normal.dot(&a) / denom;
        if lambda <= 0.0 {
            return 0.0;
        }
        let rel = s * lambda - a;
        let (alpha, beta) = (rel.dot(&ab) / ab2, rel.dot(&ad) / ad2);
        if (0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&beta) {
            (1.0 + r2 * inv_4f2).sqrt()
        } else {
            0.0
        }
    };
    let est = integrate_box(bounds, hits, *mc);
    let mut result = AreaResult::new(value, est.value, 3.0 * est.std_error / est.value.abs().max(f64::MIN_POSITIVE));
    result.std_error = Some(est.std_error);
    result.mesh = Some(mesh);
    Ok(result)
}

/// Box around the traced image of the rectangle's boundary, with a margin.
fn sample_bounds(f: f64, rect: &VerticalRect) -> [f64; 4] {
    let edges = [(rect.a, rect.b), (rect.b, rect.c), (rect.c, rect.d), (rect.d, rect.a)];
    let (mut u0, mut u1, mut v0, mut v1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (p, q) in edges {
        let path = image_path(f, p, q);
        for k in 0..=512 {
            let x = path.point(k as f64 / 512.0);
            u0 = u0.min(x.u);
            u1 = u1.max(x.u);
            v0 = v0.min(x.v);
            v1 = v1.max(x.v);
        }
    }
    let margin = 0.01 * (u1 - u0).max(v1 - v0);
    [u0 - margin, u1 + margin, v0 - margin, v1 + margin]
}
