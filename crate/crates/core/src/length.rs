//! True lengths of a space segment and of its images on the surface and on τ.
//!
//! Every curved length comes paired with an oracle value: the arc length of
//! the segment's image path `s ↦ central_project(a + s·(b − a))`, integrated by
//! adaptive quadrature. That path never touches the conic machinery, so it
//! checks classification, frames and closed forms at once.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::conics::{ccw_span, parabola_abscissa, ConicKind, ConicSection, SectionShape};
use crate::error::{GeometryError, Result};
use crate::geometry::{polar_angle, ParaboloidModel, Point2, Point3};
use crate::projection::{ray_scale, ray_scale_derivative};
use crate::quadrature::{arc_length_quadrature, FnPath, QuadratureOptions};

/// Residual bound for closed forms that are exact (circle, projected circle, parabola).
pub const EXACT_ARC_BOUND: f64 = 1e-9;
/// Residual bound for the composite chord-ratio ellipse formula.
pub const ELLIPSE_COMPOSITE_BOUND: f64 = 1e-6;
/// Subdivisions of a quarter span of a circle-like ellipse; scaled by `a/b`.
pub const DEFAULT_ELLIPSE_SEGMENTS: usize = 1024;
const MAX_ELLIPSE_SEGMENTS: usize = 1 << 22;

/// A length from a closed form paired with its quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcResult {
    pub analytic: f64,
    pub oracle: f64,
    pub rel_residual: f64,
    /// Largest residual the formula is expected to reach.
    pub bound: f64,
}

impl ArcResult {
    pub fn new(analytic: f64, oracle: f64, bound: f64, tol_abs: f64) -> Self {
        let rel_residual = (analytic - oracle).abs() / oracle.max(tol_abs);
        Self { analytic, oracle, rel_residual, bound }
    }

    pub fn zero() -> Self {
        Self { analytic: 0.0, oracle: 0.0, rel_residual: 0.0, bound: EXACT_ARC_BOUND }
    }

    pub fn within_bound(&self) -> bool {
        self.rel_residual <= self.bound
    }
}

/// Lengths of a segment `AB` and of its five images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineImageLengths {
    /// Space length of `AB`.
    #[serde(rename = "L")]
    pub l: f64,
    /// Length of `A′B′` on τ.
    #[serde(rename = "L_prime")]
    pub l_prime: f64,
    /// Perspective of `AB` on the surface.
    #[serde(rename = "L1")]
    pub l1: ArcResult,
    /// Projection of `L1` on τ.
    #[serde(rename = "L1_prime")]
    pub l1_prime: ArcResult,
    /// Perspective of `A′B′` on the surface.
    #[serde(rename = "L2")]
    pub l2: ArcResult,
    /// Projection of `L2` on τ.
    #[serde(rename = "L2_prime")]
    pub l2_prime: ArcResult,
    /// Section carrying `L1`; `None` when `A = B`.
    pub section: Option<ConicKind>,
    /// Section carrying `L2`; `None` when `A′ = B′`.
    pub second_section: Option<ConicKind>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthOptions {
    /// Sub-spans per quarter turn for a circle; multiplied by `a/b`.
    pub ellipse_segments: usize,
    pub quadrature: QuadratureOptions,
}

impl LengthOptions {
    pub fn for_model(model: &ParaboloidModel) -> Self {
        Self { ellipse_segments: DEFAULT_ELLIPSE_SEGMENTS, quadrature: QuadratureOptions::for_scale(model.f()) }
    }
}

pub fn space_length(a: Point3, b: Point3) -> f64 {
    a.distance(b)
}

pub fn ortho_length(a: Point2, b: Point2) -> f64 {
    a.distance(b)
}

/// Minor arc of the focal circle between two azimuths: `2f·Φ`, `Φ ≤ π`.
pub fn circle_arc_length(model: &ParaboloidModel, phi_a: f64, phi_b: f64) -> f64 {
    let d = ccw_span(phi_a, phi_b);
    2.0 * model.f() * d.min(2.0 * PI - d)
}

/// Complement of [`circle_arc_length`] on the full circle.
pub fn circle_arc_length_major(model: &ParaboloidModel, phi_a: f64, phi_b: f64) -> f64 {
    2.0 * model.f() * 2.0 * PI - circle_arc_length(model, phi_a, phi_b)
}

/// Chord-ratio approximation of an elliptic arc between eccentric anomalies
/// `t1` and `t2`: `chord · Δ / (2 sin(Δ/2))`.
pub fn elliptic_arc_approx(a: f64, b: f64, t1: f64, t2: f64) -> Result<f64> {
    if !(a >= b && b > 0.0) {
        return Err(GeometryError::InvalidArgument(format!("need a >= b > 0, got a = {a}, b = {b}")));
    }
    let span = (t1 - t2).abs();
    if span >= 2.0 * PI {
        return Err(GeometryError::SpanTooLarge { span });
    }
    let half = 0.5 * span;
    let mid = 0.5 * (t1 + t2);
    // product form of the chord, free of cancellation for short spans
    let (sm, cm) = mid.sin_cos();
    let chord = 2.0 * half.sin() * (a * a * sm * sm + b * b * cm * cm).sqrt();
    let ratio = if span < 1e-4 { 1.0 + span * span / 24.0 } else { span / (2.0 * half.sin()) };
    Ok(chord * ratio)
}

/// Sum of [`elliptic_arc_approx`] over `segments` equal sub-spans of
/// `[t_start, t_start + sweep]`; `sweep` may be negative.
pub fn elliptic_arc_composite(a: f64, b: f64, t_start: f64, sweep: f64, segments: usize) -> Result<f64> {
    if segments == 0 {
        return Err(GeometryError::InvalidArgument("at least one segment is required".into()));
    }
    if sweep.abs() > 2.0 * PI {
        return Err(GeometryError::SpanTooLarge { span: sweep.abs() });
    }
    let h = sweep / segments as f64;
    let mut total = crate::quadrature::NeumaierSum::default();
    for i in 0..segments {
        let t0 = t_start + h * i as f64;
        total.add(elliptic_arc_approx(a, b, t0, t0 + h)?);
    }
    Ok(total.total())
}

fn abscissa_ratio(center_u: f64, r: f64, u: f64) -> Result<f64> {
    let x = (u - center_u) / r;
    if x.abs() > 1.0 + 1e-9 {
        return Err(GeometryError::OutOfRange { u, lo: center_u - r, hi: center_u + r });
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// `r·|asin((u2 − c)/r) − asin((u1 − c)/r)|`: length of a circular arc on
/// which `u` is monotone, from the abscissas of its ends.
pub fn circular_arc_by_abscissa(center_u: f64, r: f64, u1: f64, u2: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeometryError::InvalidArgument(format!("radius must be > 0, got {r}")));
    }
    let x1 = abscissa_ratio(center_u, r, u1)?;
    let x2 = abscissa_ratio(center_u, r, u2)?;
    Ok(r * (x2.asin() - x1.asin()).abs())
}

/// `asin((u − c_u)/r)` for a point of the circle, taking the cosine leg from
/// the point's ordinate so that ends near the abscissa extremes keep their
/// precision.
fn abscissa_angle(center: Point2, p: Point2) -> f64 {
    (p.u - center.u).atan2((p.v - center.v).abs())
}

/// Length of the arc of the circle `(center, r)` running from `from` to `to`
/// on the side containing `via`, evaluated with the abscissa form piecewise
/// between the points where `u` turns.
pub fn projected_arc_length(center: Point2, r: f64, from: Point2, to: Point2, via: Point2) -> Result<f64> {
    let angle = |p: Point2| polar_angle(p.u - center.u, p.v - center.v);
    let (t0, t1, tm) = (angle(from)?, angle(to)?, angle(via)?);
    let span = ccw_span(t0, t1);
    let sweep = if ccw_span(t0, tm) <= span { span } else { span - 2.0 * PI };
    let (lo, hi) = if sweep >= 0.0 { (t0, t0 + sweep) } else { (t0 + sweep, t0) };
    let (p_lo, p_hi) = if sweep >= 0.0 { (from, to) } else { (to, from) };

    // u = c + r·cos θ turns at multiples of π
    let mut cuts = vec![];
    let mut k = (lo / PI).floor() + 1.0;
    while k * PI < hi {
        cuts.push(k * PI);
        k += 1.0;
    }
    let turn_angle = |theta: f64| if ((theta / PI).round() as i64).rem_euclid(2) == 0 { FRAC_PI_2 } else { -FRAC_PI_2 };
    let mut ends = Vec::with_capacity(cuts.len() + 2);
    ends.push(abscissa_angle(center, p_lo));
    ends.extend(cuts.iter().map(|&c| turn_angle(c)));
    ends.push(abscissa_angle(center, p_hi));
    Ok(ends.windows(2).map(|w| r * (w[1] - w[0]).abs()).sum())
}

pub fn parabola_chord_proj(x_a: f64, x_b: f64) -> f64 {
    (x_a - x_b).abs()
}

/// Antiderivative of `√(1 + (X/2f)²)`, the speed along `Z = (X² − 4f²)/4f`.
fn parabola_primitive(f: f64, x: f64) -> f64 {
    f * (x / (2.0 * f)).asinh() + x * (x * x + 4.0 * f * f).sqrt() / (4.0 * f)
}

/// Length along the vertical section between abscissas `x_a` and `x_b`.
pub fn parabola_arc_length(model: &ParaboloidModel, x_a: f64, x_b: f64) -> f64 {
    let f = model.f();
    (parabola_primitive(f, x_a) - parabola_primitive(f, x_b)).abs()
}

/// Image arc of one segment on the surface and its projection on τ.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ImageArc {
    pub section: ConicSection,
    pub surface: ArcResult,
    pub projected: ArcResult,
}

/// Rejects segments whose image runs off to infinity, i.e. those meeting the
/// axis above the vertex direction.
fn check_bounded(model: &ParaboloidModel, p: Point3, q: Point3) -> Result<()> {
    let d = q - p;
    let dh2 = d.u * d.u + d.v * d.v;
    let s = if dh2 > 0.0 { (-(p.u * d.u + p.v * d.v) / dh2).clamp(0.0, 1.0) } else { 0.0 };
    let x = p + d * s;
    if x.r() <= model.tol_abs() + model.tol_rel() * x.norm() && x.w > 0.0 {
        return Err(GeometryError::UnboundedImage);
    }
    Ok(())
}

/// Oracle values for the image of segment `pq`: lengths of
/// `s ↦ central_project(p + s(q − p))` and of its projection on τ.
pub(crate) fn image_path_lengths(model: &ParaboloidModel, p: Point3, q: Point3, opts: QuadratureOptions) -> Result<(f64, f64)> {
    let f = model.f();
    let d = q - p;
    let at = move |s: f64| p + d * s;
    let velocity = move |s: f64| {
        let x = at(s);
        x * ray_scale_derivative(f, x, d) + d * ray_scale(f, x)
    };
    let surface = FnPath { point: move |s: f64| at(s) * ray_scale(f, at(s)), velocity };
    let flat = FnPath {
        point: move |s: f64| {
            let x = at(s) * ray_scale(f, at(s));
            Point3::new(x.u, x.v, 0.0)
        },
        velocity: move |s: f64| {
            let v = velocity(s);
            Point3::new(v.u, v.v, 0.0)
        },
    };
    Ok((arc_length_quadrature(&surface, 0.0, 1.0, opts)?, arc_length_quadrature(&flat, 0.0, 1.0, opts)?))
}

fn ellipse_segments(base: usize, a: f64, b: f64, sweep: f64) -> usize {
    let n = (base as f64 * (a / b) * sweep.abs() / FRAC_PI_2).ceil();
    (n as usize).clamp(1, MAX_ELLIPSE_SEGMENTS)
}

/// Side-selected sweep from `t0` to `t1` passing through `tm`.
fn sweep_through(t0: f64, t1: f64, tm: f64) -> f64 {
    let span = ccw_span(t0, t1);
    if ccw_span(t0, tm) <= span {
        span
    } else {
        span - 2.0 * PI
    }
}

pub(crate) fn image_arc(model: &ParaboloidModel, p: Point3, q: Point3, opts: &LengthOptions) -> Result<ImageArc> {
    let plane = model.plane_through_focus(p, q)?;
    let section = model.classify_section(plane);
    let pp = model.central_project(p)?;
    let qq = model.central_project(q)?;
    check_bounded(model, p, q)?;
    let mid = p + (q - p) * 0.5;
    let mm = mid * ray_scale(model.f(), mid);

    let (surface, projected, surface_bound) = match section.shape {
        SectionShape::Circle { .. } => {
            let arc = circle_arc_length(model, pp.phi()?, qq.phi()?);
            (arc, arc, EXACT_ARC_BOUND)
        }
        SectionShape::Ellipse(e) => {
            let (lp, lq, lm) = (e.to_local(model, pp)?, e.to_local(model, qq)?, e.to_local(model, mm)?);
            let sweep = sweep_through(lp.t, lq.t, lm.t);
            let segments = ellipse_segments(opts.ellipse_segments, e.a, e.b, sweep);
            let surface = elliptic_arc_composite(e.a, e.b, lp.t, sweep, segments)?;
            let projected = projected_arc_length(
                section.projected_center,
                section.projected_radius,
                pp.horizontal(),
                qq.horizontal(),
                mm.horizontal(),
            )?;
            (surface, projected, ELLIPSE_COMPOSITE_BOUND)
        }
        SectionShape::Parabola { phi } => {
            let (xp, xq) = (parabola_abscissa(phi, pp), parabola_abscissa(phi, qq));
            (parabola_arc_length(model, xp, xq), parabola_chord_proj(xp, xq), EXACT_ARC_BOUND)
        }
    };
    let (oracle_surface, oracle_projected) = image_path_lengths(model, p, q, opts.quadrature)?;
    let tol_abs = model.tol_abs();
    Ok(ImageArc {
        section,
        surface: ArcResult::new(surface, oracle_surface, surface_bound, tol_abs),
        projected: ArcResult::new(projected, oracle_projected, EXACT_ARC_BOUND, tol_abs),
    })
}

/// Lengths of `AB`, `A′B′` and the four image arcs.
pub fn line_image_lengths(model: &ParaboloidModel, a: Point3, b: Point3, opts: &LengthOptions) -> Result<LineImageLengths> {
    // both endpoints must have perspectives even for a degenerate segment
    model.double_project(a)?;
    model.double_project(b)?;
    let first = if a == b { None } else { Some(image_arc(model, a, b, opts)?) };
    let (la, lb) = (model.lift_to_director(a.horizontal()), model.lift_to_director(b.horizontal()));
    let second = if la == lb { None } else { Some(image_arc(model, la, lb, opts)?) };
    let parts = |arc: Option<ImageArc>| match arc {
        Some(x) => (x.surface, x.projected, Some(x.section.kind())),
        None => (ArcResult::zero(), ArcResult::zero(), None),
    };
    let (l1, l1_prime, section) = parts(first);
    let (l2, l2_prime, second_section) = parts(second);
    Ok(LineImageLengths {
        l: space_length(a, b),
        l_prime: ortho_length(a.horizontal(), b.horizontal()),
        l1,
        l1_prime,
        l2,
        l2_prime,
        section,
        second_section,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ParaboloidModel {
        ParaboloidModel::new(1.0).unwrap()
    }

    fn opts() -> LengthOptions {
        LengthOptions::for_model(&unit())
    }

    #[test]
    fn straight_lengths() {
        assert_eq!(space_length(Point3::ORIGIN, Point3::new(1.0, 2.0, 2.0)), 3.0);
        assert_eq!(space_length(Point3::new(1.0, 1.0, 1.0), Point3::new(1.0, 1.0, 1.0)), 0.0);
        assert!((space_length(Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 2.0, 0.0)) - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(ortho_length(Point2::new(3.0, 4.0), Point2::new(0.0, 0.0)), 5.0);
        assert_eq!(ortho_length(Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)), 0.0);
        assert_eq!(ortho_length(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)), 2.0);
    }

    #[test]
    fn circle_arcs() {
        let m = unit();
        assert!((circle_arc_length(&m, 0.0, FRAC_PI_2) - PI).abs() < 1e-15);
        assert_eq!(circle_arc_length(&m, 0.7, 0.7), 0.0);
        let m2 = ParaboloidModel::new(2.0).unwrap();
        assert!((circle_arc_length(&m2, 0.0, FRAC_PI_2) - 2.0 * PI).abs() < 1e-15);
        // wraps to the minor arc
        assert!((circle_arc_length(&m, -3.0, 3.0) - 2.0 * (2.0 * PI - 6.0)).abs() < 1e-14);
        assert!((circle_arc_length_major(&m, 0.0, FRAC_PI_2) - 3.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn chord_ratio_examples() {
        assert!((elliptic_arc_approx(1.0, 1.0, 0.0, FRAC_PI_2).unwrap() - FRAC_PI_2).abs() < 1e-15);
        // frozen from a 30-digit evaluation of √5/√2 · π/2
        let v = elliptic_arc_approx(2.0, 1.0, 0.0, FRAC_PI_2).unwrap();
        assert!((v - 2.483_647_066_449_025).abs() < 1e-14, "{v}");
        assert_eq!(elliptic_arc_approx(2.0, 1.0, 0.4, 0.4).unwrap(), 0.0);
        assert!(matches!(elliptic_arc_approx(2.0, 1.0, 0.0, 2.0 * PI), Err(GeometryError::SpanTooLarge { .. })));
        assert!(elliptic_arc_approx(1.0, 2.0, 0.0, 1.0).is_err());
        // continuous across the series switch
        let (lo, hi) = (elliptic_arc_approx(2.0, 1.0, 0.3, 0.3 + 0.99e-4).unwrap(), elliptic_arc_approx(2.0, 1.0, 0.3, 0.3 + 1.01e-4).unwrap());
        assert!((hi / lo - 1.01 / 0.99).abs() < 1e-6);
    }

    #[test]
    fn abscissa_form_examples() {
        assert!((circular_arc_by_abscissa(-1.5, 2.5, -1.5, 1.0).unwrap() - 2.5 * FRAC_PI_2).abs() < 1e-15);
        assert!((circular_arc_by_abscissa(0.0, 1.0, 0.0, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(circular_arc_by_abscissa(0.0, 1.0, 0.3, 0.3).unwrap(), 0.0);
        assert!(matches!(circular_arc_by_abscissa(0.0, 1.0, 0.0, 1.5), Err(GeometryError::OutOfRange { .. })));
    }

    #[test]
    fn abscissa_form_splits_at_turns() {
        let c = Point2::new(0.5, -0.25);
        let at = |t: f64| Point2::new(c.u + 2.0 * t.cos(), c.v + 2.0 * t.sin());
        // three quarters of a turn through the u-extreme at θ = π
        let l = projected_arc_length(c, 2.0, at(FRAC_PI_2), at(0.0), at(PI)).unwrap();
        assert!((l - 3.0 * PI).abs() < 1e-14, "{l}");
        let l = projected_arc_length(c, 2.0, at(-0.3), at(0.4), at(0.0)).unwrap();
        assert!((l - 1.4).abs() < 1e-14);
    }

    #[test]
    fn parabola_examples() {
        let m = unit();
        assert_eq!(parabola_chord_proj(2.0, -1.0), 3.0);
        assert_eq!(parabola_chord_proj(0.0, 0.0), 0.0);
        assert_eq!(parabola_chord_proj(5.0, 2.0), 3.0);
        // frozen from 30-digit quadrature of √(1 + X²/4)
        assert!((parabola_arc_length(&m, 0.0, 2.0) - 2.295_587_149_392_638).abs() < 1e-14);
        assert!((parabola_arc_length(&m, -1.0, 1.0) - 2.080_457_638_869_102).abs() < 1e-14);
        assert_eq!(parabola_arc_length(&m, 0.8, 0.8), 0.0);
    }

    #[test]
    fn horizontal_segment_in_focal_plane() {
        let m = unit();
        let r = line_image_lengths(&m, Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 2.0, 0.0), &opts()).unwrap();
        assert!((r.l - 8f64.sqrt()).abs() < 1e-15 && (r.l_prime - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.section, Some(ConicKind::Circle));
        assert!((r.l1.analytic - PI).abs() < 1e-14);
        assert_eq!(r.l1.analytic, r.l1_prime.analytic);
        assert!(r.l1.rel_residual < 1e-9 && r.l1_prime.rel_residual < 1e-9);
        assert_eq!(r.second_section, Some(ConicKind::Ellipse));
        assert!(r.l2.within_bound() && r.l2_prime.within_bound(), "{r:?}");
    }

    #[test]
    fn vertical_segment_gives_parabola() {
        let m = unit();
        let r = line_image_lengths(&m, Point3::new(1.0, 0.0, 0.0), Point3::new(1.0, 0.0, 1.0), &opts()).unwrap();
        assert_eq!(r.l, 1.0);
        assert_eq!(r.section, Some(ConicKind::Parabola));
        // A₁ = (2, 0, 0), B₁ = (2 + 2√2, 0, 2 + 2√2); frozen from 30-digit quadrature
        assert!((r.l1.analytic - 5.627_947_826_578_357).abs() < 1e-13, "{}", r.l1.analytic);
        assert!((r.l1_prime.analytic - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!(r.l1.rel_residual < 1e-9 && r.l1_prime.rel_residual < 1e-9);
        // A′ = B′
        assert_eq!(r.second_section, None);
        assert_eq!(r.l2.analytic, 0.0);
    }

    #[test]
    fn coincident_endpoints() {
        let p = Point3::new(0.3, -2.0, 1.0);
        let r = line_image_lengths(&unit(), p, p, &opts()).unwrap();
        assert_eq!((r.l, r.l_prime, r.l1.analytic, r.l1_prime.analytic, r.l2.analytic, r.l2_prime.analytic), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn degenerate_segments() {
        let m = unit();
        let o = opts();
        assert_eq!(
            line_image_lengths(&m, Point3::new(1.0, 1.0, 1.0), Point3::new(2.0, 2.0, 2.0), &o),
            Err(GeometryError::DegenerateLineThroughFocus)
        );
        assert!(matches!(
            line_image_lengths(&m, Point3::new(0.0, 0.0, 1.0), Point3::new(2.0, 2.0, 2.0), &o),
            Err(GeometryError::DegenerateOnAxis { .. })
        ));
        assert_eq!(
            line_image_lengths(&m, Point3::new(1.0, 0.0, 1.0), Point3::new(-1.0, 0.0, 1.0), &o),
            Err(GeometryError::UnboundedImage)
        );
        // crossing the axis below the focus passes through the vertex
        let r = line_image_lengths(&m, Point3::new(1.0, 0.0, -1.0), Point3::new(-1.0, 0.0, -1.0), &o).unwrap();
        assert!(r.l1.within_bound() && r.l1_prime.within_bound());
    }

    #[test]
    fn tilted_segment_is_elliptic() {
        let m = unit();
        let r = line_image_lengths(&m, Point3::new(3.0, -1.0, 2.0), Point3::new(-0.5, 2.5, 0.7), &opts()).unwrap();
        assert_eq!(r.section, Some(ConicKind::Ellipse));
        for arc in [r.l1, r.l1_prime, r.l2, r.l2_prime] {
            assert!(arc.within_bound(), "{r:?}");
        }
        let chord = m.central_project(Point3::new(3.0, -1.0, 2.0)).unwrap().distance(m.central_project(Point3::new(-0.5, 2.5, 0.7)).unwrap());
        assert!(r.l1.analytic >= chord);
    }
}
