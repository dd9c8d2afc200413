//! Sections of the paraboloid by planes through the focus.
//!
//! A plane `l·u + m·v + n·w = 0` meets the surface in a circle when it is
//! horizontal (`|n| = 1`), a parabola when it is vertical (`n = 0`) and an
//! ellipse otherwise. Eliminating `w` shows that every section projects onto
//! τ as the circle centred at `(−2f·l/n, −2f·m/n)` with radius `2f/|n|`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::geometry::{polar_angle, FocalPlane, ParaboloidModel, Point2, Point3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConicKind {
    Circle,
    Ellipse,
    Parabola,
}

/// Elliptic section with its centre, semi-axes and in-plane frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseSection {
    pub center: Point3,
    /// Semi-major axis, along the line of steepest slope of the plane.
    pub a: f64,
    /// Semi-minor axis, horizontal.
    pub b: f64,
    pub j_dir: Vector3<f64>,
    pub k_dir: Vector3<f64>,
    /// `atan2(l, m)`.
    pub phi_oe: f64,
}

/// A point expressed in the ellipse frame `(O_E, j, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalPoint {
    pub j: f64,
    pub k: f64,
    /// Eccentric anomaly: `j = a·cos t`, `k = b·sin t` on the curve.
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectionShape {
    /// The focal circle `w = 0`, centred at the focus.
    Circle { radius: f64 },
    Ellipse(EllipseSection),
    /// Vertical section; `phi` rotates the plane onto the u–w plane.
    Parabola { phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicSection {
    pub plane: FocalPlane,
    pub shape: SectionShape,
    /// Centre of the section's orthogonal projection on τ.
    pub projected_center: Point2,
    /// Radius of that projection; infinite for parabolas.
    pub projected_radius: f64,
}

impl ConicSection {
    pub fn kind(&self) -> ConicKind {
        match self.shape {
            SectionShape::Circle { .. } => ConicKind::Circle,
            SectionShape::Ellipse(_) => ConicKind::Ellipse,
            SectionShape::Parabola { .. } => ConicKind::Parabola,
        }
    }

    pub fn ellipse(&self) -> Option<&EllipseSection> {
        match &self.shape {
            SectionShape::Ellipse(e) => Some(e),
            _ => None,
        }
    }
}

impl ParaboloidModel {
    fn elliptic_n(&self, plane: &FocalPlane) -> Result<f64> {
        let n_abs = plane.n.abs();
        if n_abs <= self.tol_rel() || (1.0 - n_abs).abs() <= self.tol_rel() {
            return Err(GeometryError::NotElliptic { n_abs });
        }
        Ok(plane.n)
    }

    pub fn classify_section(&self, plane: FocalPlane) -> ConicSection {
        let n_abs = plane.n.abs();
        let f = self.f();
        if (1.0 - n_abs).abs() <= self.tol_rel() {
            ConicSection {
                plane,
                shape: SectionShape::Circle { radius: 2.0 * f },
                projected_center: Point2::new(0.0, 0.0),
                projected_radius: 2.0 * f,
            }
        } else if n_abs <= self.tol_rel() {
            // the horizontal direction (m, −l) spans the plane with the w-axis
            let s = plane.slope();
            let phi = (-plane.l / s).atan2(plane.m / s);
            ConicSection {
                plane,
                shape: SectionShape::Parabola { phi },
                projected_center: Point2::new(f64::NAN, f64::NAN),
                projected_radius: f64::INFINITY,
            }
        } else {
            let ellipse = self.ellipse_frame(plane).expect("elliptic by classification");
            let c = ellipse.center;
            ConicSection {
                plane,
                shape: SectionShape::Ellipse(ellipse),
                projected_center: c.horizontal(),
                projected_radius: 2.0 * f / n_abs,
            }
        }
    }

    /// Centre `O_E` of an elliptic section.
    pub fn ellipse_center(&self, plane: FocalPlane) -> Result<Point3> {
        let n = self.elliptic_n(&plane)?;
        let two_f = 2.0 * self.f();
        Ok(Point3::new(
            -two_f * plane.l / n,
            -two_f * plane.m / n,
            two_f * (plane.l * plane.l + plane.m * plane.m) / (n * n),
        ))
    }

    /// Semi-axes `(a, b)` from the edge-view construction:
    /// `2a = 4f(1 + q)` and `2b = 4f·√(1 + q)` with `q = w_E²/r_E²`.
    pub fn ellipse_axes(&self, plane: FocalPlane) -> Result<(f64, f64)> {
        let c = self.ellipse_center(plane)?;
        let r = c.r();
        let q = (c.w * c.w) / (r * r);
        let f = self.f();
        Ok((2.0 * f * (1.0 + q), 2.0 * f * (1.0 + q).sqrt()))
    }

    pub fn ellipse_frame(&self, plane: FocalPlane) -> Result<EllipseSection> {
        let center = self.ellipse_center(plane)?;
        let (a, b) = self.ellipse_axes(plane)?;
        let normal = plane.normal();
        let s = plane.slope();
        // projection of the w unit vector onto the plane, normalised
        let mut j_dir = Vector3::new(-plane.n * plane.l / s, -plane.n * plane.m / s, s);
        j_dir /= j_dir.norm();
        let k_dir = normal.cross(&j_dir);
        Ok(EllipseSection { center, a, b, j_dir, k_dir, phi_oe: plane.l.atan2(plane.m) })
    }
}

impl EllipseSection {
    /// Rotates `p` counter-clockwise by `phi_oe`, the inverse of
    /// [`Point3::rotate_about_w`]. In this frame the minor axis is parallel
    /// to x and the major axis lies in the y–z plane.
    pub fn to_edge_view(&self, p: Point3) -> Point3 {
        p.rotate_about_w(-self.phi_oe)
    }

    pub fn point_at(&self, t: f64) -> Point3 {
        let (s, c) = t.sin_cos();
        let v = self.center.to_vector() + self.j_dir * (self.a * c) + self.k_dir * (self.b * s);
        Point3::from_vector(&v)
    }

    pub fn tangent_at(&self, t: f64) -> Vector3<f64> {
        let (s, c) = t.sin_cos();
        self.j_dir * (-self.a * s) + self.k_dir * (self.b * c)
    }

    /// Coordinates of `p` in the ellipse frame; `p` must lie on the plane.
    pub fn to_local(&self, model: &ParaboloidModel, p: Point3) -> Result<LocalPoint> {
        let normal = self.j_dir.cross(&self.k_dir);
        let d = p.to_vector() - self.center.to_vector();
        let distance = normal.dot(&p.to_vector()).abs();
        if distance > model.tol_abs() + model.tol_rel() * (p.norm() + self.a) {
            return Err(GeometryError::NotOnPlane { distance });
        }
        let j = d.dot(&self.j_dir);
        let k = d.dot(&self.k_dir);
        let t = if j == 0.0 && k == 0.0 { 0.0 } else { polar_angle(j / self.a, k / self.b)? };
        Ok(LocalPoint { j, k, t })
    }
}

impl LocalPoint {
    /// `j²/a² + k²/b²`; 1 on the curve.
    pub fn ellipse_level(&self, a: f64, b: f64) -> f64 {
        (self.j / a).powi(2) + (self.k / b).powi(2)
    }
}

/// X-coordinate of `p` in the rotated frame of a vertical section.
pub fn parabola_abscissa(phi: f64, p: Point3) -> f64 {
    p.rotate_about_w(phi).u
}

/// Wraps an angle difference into `[0, 2π)`.
pub(crate) fn ccw_span(from: f64, to: f64) -> f64 {
    (to - from).rem_euclid(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit() -> ParaboloidModel {
        ParaboloidModel::new(1.0).unwrap()
    }

    fn plane(l: f64, m: f64, n: f64) -> FocalPlane {
        FocalPlane::new(l, m, n).unwrap()
    }

    #[test]
    fn classification_examples() {
        let m = unit();
        let c = m.classify_section(plane(0.0, 0.0, 1.0));
        assert_eq!(c.kind(), ConicKind::Circle);
        assert_eq!(c.shape, SectionShape::Circle { radius: 2.0 });

        let c = m.classify_section(plane(0.6, 0.0, 0.8));
        let e = c.ellipse().unwrap();
        assert!((e.center - Point3::new(-1.5, 0.0, 1.125)).norm() < 1e-12);
        assert!((e.a - 3.125).abs() < 1e-12 && (e.b - 2.5).abs() < 1e-12);

        assert_eq!(m.classify_section(plane(1.0, 0.0, 0.0)).kind(), ConicKind::Parabola);
    }

    #[test]
    fn ellipse_center_examples() {
        let m = unit();
        let c = m.ellipse_center(plane(0.6, 0.0, 0.8)).unwrap();
        assert!((c - Point3::new(-1.5, 0.0, 1.125)).norm() < 1e-15);
        // independent: the projected circle (U + 1.5)² + V² = 2.5², lifted onto 0.6U + 0.8W = 0
        assert!((c.w - (-0.75 * -1.5)).abs() < 1e-15);
        let c = m.ellipse_center(plane(0.0, 0.6, 0.8)).unwrap();
        assert!((c - Point3::new(0.0, -1.5, 1.125)).norm() < 1e-15);
        assert!(matches!(m.ellipse_center(plane(0.0, 0.0, 1.0)), Err(GeometryError::NotElliptic { .. })));
        assert!(matches!(m.ellipse_center(plane(0.0, 1.0, 0.0)), Err(GeometryError::NotElliptic { .. })));
    }

    #[test]
    fn ellipse_axes_examples() {
        let (a, b) = unit().ellipse_axes(plane(0.6, 0.0, 0.8)).unwrap();
        assert!((a - 3.125).abs() < 1e-14 && (b - 2.5).abs() < 1e-14);
        let (a, b) = ParaboloidModel::new(2.0).unwrap().ellipse_axes(plane(0.6, 0.0, 0.8)).unwrap();
        assert!((a - 6.25).abs() < 1e-13 && (b - 5.0).abs() < 1e-13);
    }

    #[test]
    fn ellipse_frame_example() {
        let m = unit();
        let e = m.ellipse_frame(plane(0.6, 0.0, 0.8)).unwrap();
        assert!((e.j_dir - Vector3::new(-0.8, 0.0, 0.6)).norm() < 1e-15);
        assert!((e.k_dir - Vector3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!((e.phi_oe - PI / 2.0).abs() < 1e-15);
        for t in [0.0, PI, PI / 2.0, -PI / 2.0] {
            let p = e.point_at(t);
            assert!(m.on_surface(p), "{t}: {p:?}");
        }
        // I₁ = (−4, 0, 3), I₂ = (1, 0, −0.75)
        assert!((e.point_at(0.0) - Point3::new(-4.0, 0.0, 3.0)).norm() < 1e-14);
        assert!((e.point_at(PI) - Point3::new(1.0, 0.0, -0.75)).norm() < 1e-14);
    }

    #[test]
    fn local_coordinates_examples() {
        let m = unit();
        let e = m.ellipse_frame(plane(0.6, 0.0, 0.8)).unwrap();
        let lp = e.to_local(&m, e.point_at(0.0)).unwrap();
        assert!((lp.j - 3.125).abs() < 1e-14 && lp.k.abs() < 1e-14 && lp.t.abs() < 1e-14);
        let lp = e.to_local(&m, e.point_at(PI / 2.0)).unwrap();
        assert!(lp.j.abs() < 1e-14 && (lp.k - 2.5).abs() < 1e-14 && (lp.t - PI / 2.0).abs() < 1e-14);
        // a generic point of the plane, projected onto the surface
        let a1 = m.central_project(Point3::new(1.0, 3.0, -0.75)).unwrap();
        let lp = e.to_local(&m, a1).unwrap();
        assert!((lp.ellipse_level(e.a, e.b) - 1.0).abs() < 1e-12);
        assert!(matches!(e.to_local(&m, Point3::new(0.0, 0.0, 1.0)), Err(GeometryError::NotOnPlane { .. })));
    }

    #[test]
    fn parabola_rotation_maps_plane_to_uw() {
        let m = unit();
        let pl = plane(0.3, 0.7, 0.0);
        let SectionShape::Parabola { phi } = m.classify_section(pl).shape else { panic!() };
        let p = m.central_project(Point3::new(-0.7, 0.3, 2.0)).unwrap();
        let q = p.rotate_about_w(phi);
        assert!(q.v.abs() < 1e-14);
        assert!((q.w - (q.u * q.u - 4.0) / 4.0).abs() < 1e-13);
        assert!((parabola_abscissa(phi, p) - q.u).abs() == 0.0);
    }

    #[test]
    fn phi_oe_rotation_aligns_axes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = unit();
        for _ in 0..200 {
            let pl = plane(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.05..1.0));
            let Some(e) = m.classify_section(pl).ellipse().copied() else { continue };
            let k = e.to_edge_view(Point3::from_vector(&e.k_dir));
            let j = e.to_edge_view(Point3::from_vector(&e.j_dir));
            assert!(k.v.abs() < 1e-12 && k.w.abs() < 1e-12);
            assert!(j.u.abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn section_identities(l in -1f64..1.0, mm in -1f64..1.0, n in 0.02f64..0.999, f in 0.2f64..5.0,
                              seed in any::<u64>()) {
            let m = ParaboloidModel::new(f).unwrap();
            let pl = plane(l, mm, n);
            let sec = m.classify_section(pl);
            let e = *sec.ellipse().unwrap();
            prop_assert!(e.a >= e.b && e.b > 0.0);
            prop_assert!((e.b * e.b - 2.0 * f * e.a).abs() <= 1e-9 * e.b * e.b);
            // semi-axes agree with 2f/n² and 2f/|n|
            prop_assert!((e.a - 2.0 * f / (pl.n * pl.n)).abs() <= 1e-10 * e.a);
            prop_assert!((e.b - 2.0 * f / pl.n.abs()).abs() <= 1e-10 * e.b);
            prop_assert!(pl.eval(e.center).abs() <= 1e-12 * (1.0 + e.center.norm()));
            prop_assert!(e.j_dir.dot(&pl.normal()).abs() < 1e-12 && e.k_dir.dot(&pl.normal()).abs() < 1e-12);
            prop_assert!(e.j_dir.dot(&e.k_dir).abs() < 1e-12 && e.k_dir.z.abs() < 1e-12 && e.j_dir.z >= 0.0);
            prop_assert!((e.j_dir.cross(&e.k_dir) - pl.normal()).norm() < 1e-12);

            // random points of the plane projected onto the surface lie on the ellipse
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (u1, u2) = (pl.normal().cross(&Vector3::new(0.3, -0.2, 0.9)).normalize(), e.k_dir);
            for _ in 0..100 {
                let th = rng.random_range(-PI..PI);
                let p = Point3::from_vector(&(u1 * th.cos() + u2 * th.sin()));
                if p.r() < 1e-6 { continue; }
                let s = m.central_project(p).unwrap();
                let lp = e.to_local(&m, s).unwrap();
                prop_assert!((lp.ellipse_level(e.a, e.b) - 1.0).abs() <= 1e-8);
                // its projection sits on the projected circle
                let d = s.horizontal().distance(sec.projected_center);
                prop_assert!((d - sec.projected_radius).abs() <= 1e-9 * sec.projected_radius);
            }
        }
    }
}
