//! Geometric kernel: the paraboloid `u² + v² = 4f·w + 4f²`, points in space
//! and on the director plane, and planes through the focus.
//!
//! The focus sits at the origin, the focal plane σ is `w = 0` and the
//! director plane τ is `w = -2f`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

pub const DEFAULT_TOL_REL: f64 = 1e-9;
pub const DEFAULT_TOL_ABS_PER_F: f64 = 1e-12;

/// The projection surface together with the tolerance policy used by every
/// predicate in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParaboloidModel {
    f: f64,
    tol_rel: f64,
    tol_abs: f64,
}

impl ParaboloidModel {
    /// Model with the default tolerances (`tol_rel = 1e-9`, `tol_abs = 1e-12·f`).
    pub fn new(f: f64) -> Result<Self> {
        Self::with_tolerances(f, DEFAULT_TOL_REL, DEFAULT_TOL_ABS_PER_F * f)
    }

    pub fn with_tolerances(f: f64, tol_rel: f64, tol_abs: f64) -> Result<Self> {
        if !(f.is_finite() && f > 0.0) {
            return Err(GeometryError::InvalidModel(format!("focal parameter must be > 0, got {f}")));
        }
        if !(tol_rel > 0.0 && tol_rel <= 1e-6) {
            return Err(GeometryError::InvalidModel(format!(
                "tol_rel must lie in (0, 1e-6], got {tol_rel}"
            )));
        }
        if !(tol_abs.is_finite() && tol_abs > 0.0) {
            return Err(GeometryError::InvalidModel(format!("tol_abs must be > 0, got {tol_abs}")));
        }
        Ok(Self { f, tol_rel, tol_abs })
    }

    #[inline]
    pub fn f(&self) -> f64 {
        self.f
    }

    #[inline]
    pub fn tol_rel(&self) -> f64 {
        self.tol_rel
    }

    #[inline]
    pub fn tol_abs(&self) -> f64 {
        self.tol_abs
    }

    /// Height of the director plane τ.
    #[inline]
    pub fn director_w(&self) -> f64 {
        -2.0 * self.f
    }

    /// Height of the surface above `(u, v)`.
    #[inline]
    pub fn surface_w(&self, u: f64, v: f64) -> f64 {
        (u * u + v * v - 4.0 * self.f * self.f) / (4.0 * self.f)
    }

    /// Residual of the surface equation, `u² + v² − 4f·w − 4f²`.
    #[inline]
    pub fn surface_residual(&self, p: Point3) -> f64 {
        p.u * p.u + p.v * p.v - 4.0 * self.f * p.w - 4.0 * self.f * self.f
    }

    /// Same residual scaled by the magnitude of its terms.
    pub fn surface_rel_residual(&self, p: Point3) -> f64 {
        let scale = p.u * p.u + p.v * p.v + 4.0 * self.f * self.f;
        self.surface_residual(p).abs() / scale
    }

    pub fn on_surface(&self, p: Point3) -> bool {
        let scale = p.u * p.u + p.v * p.v + 4.0 * self.f * self.f;
        self.surface_residual(p).abs() <= self.tol_abs + self.tol_rel * scale
    }

    /// Point of τ directly below `p` (as a space point).
    #[inline]
    pub fn lift_to_director(&self, p: Point2) -> Point3 {
        Point3::new(p.u, p.v, self.director_w())
    }

    /// The plane through the focus containing the line `ab`.
    pub fn plane_through_focus(&self, a: Point3, b: Point3) -> Result<FocalPlane> {
        let (va, vb) = (a.to_vector(), b.to_vector());
        let cross = va.cross(&vb);
        let norm = cross.norm();
        if norm <= self.tol_abs + self.tol_rel * va.norm() * vb.norm() {
            return Err(GeometryError::DegenerateLineThroughFocus);
        }
        Ok(FocalPlane::from_normal(cross / norm))
    }
}

/// A point in space, in the same length unit as `f`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { u: 0.0, v: 0.0, w: 0.0 };

    #[inline]
    pub const fn new(u: f64, v: f64, w: f64) -> Self {
        Self { u, v, w }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.w.is_finite()
    }

    /// Distance from the optical axis.
    #[inline]
    pub fn r(&self) -> f64 {
        self.u.hypot(self.v)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    /// Azimuth of the orthogonal projection onto σ, measured from the u-axis.
    pub fn phi(&self) -> Result<f64> {
        polar_angle(self.u, self.v)
    }

    /// Inclination of the ray from the focus to this point against σ.
    pub fn theta(&self) -> Result<f64> {
        if self.r() == 0.0 && self.w == 0.0 {
            return Err(GeometryError::DegenerateOrigin);
        }
        Ok(self.w.atan2(self.r()))
    }

    #[inline]
    pub fn horizontal(&self) -> Point2 {
        Point2::new(self.u, self.v)
    }

    #[inline]
    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, self.w)
    }

    #[inline]
    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    #[inline]
    pub fn dot(&self, o: Point3) -> f64 {
        self.u * o.u + self.v * o.v + self.w * o.w
    }

    pub fn distance(&self, o: Point3) -> f64 {
        (*self - o).norm()
    }

    /// Rotation about the w-axis by `phi`, with the matrix
    /// `[[cos, sin, 0], [−sin, cos, 0], [0, 0, 1]]`.
    pub fn rotate_about_w(&self, phi: f64) -> Point3 {
        let (s, c) = phi.sin_cos();
        Point3::new(c * self.u + s * self.v, -s * self.u + c * self.v, self.w)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.u + o.u, self.v + o.v, self.w + o.w)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.u - o.u, self.v - o.v, self.w - o.w)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.u * s, self.v * s, self.w * s)
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(c: [f64; 3]) -> Self {
        Point3::new(c[0], c[1], c[2])
    }
}

/// A point of the director plane τ; its height `-2f` is implied.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub u: f64,
    pub v: f64,
}

impl Point2 {
    #[inline]
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn phi(&self) -> Result<f64> {
        polar_angle(self.u, self.v)
    }

    pub fn distance(&self, o: Point2) -> f64 {
        (self.u - o.u).hypot(self.v - o.v)
    }
}

/// Unit normal `(l, m, n)` of a plane through the focus, `l·u + m·v + n·w = 0`.
///
/// The sign is canonical: `n ≥ 0`, then `m ≥ 0` when `n = 0`, then `l > 0`
/// when both vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalPlane {
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl FocalPlane {
    /// Normalizes `(l, m, n)` and applies the canonical sign.
    pub fn new(l: f64, m: f64, n: f64) -> Result<Self> {
        let v = Vector3::new(l, m, n);
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(GeometryError::InvalidArgument("plane normal must be nonzero".into()));
        }
        Ok(Self::from_normal(v / norm))
    }

    fn from_normal(v: Vector3<f64>) -> Self {
        let flip = v.z < 0.0 || (v.z == 0.0 && (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)));
        let v = if flip { -v } else { v };
        // avoid carrying negative zeros into atan2-based angles
        Self { l: v.x + 0.0, m: v.y + 0.0, n: v.z + 0.0 }
    }

    #[inline]
    pub fn normal(&self) -> Vector3<f64> {
        Vector3::new(self.l, self.m, self.n)
    }

    /// Signed distance of `p` from the plane.
    #[inline]
    pub fn eval(&self, p: Point3) -> f64 {
        self.l * p.u + self.m * p.v + self.n * p.w
    }

    /// `√(l² + m²)`, the sine of the plane's inclination to σ.
    #[inline]
    pub fn slope(&self) -> f64 {
        self.l.hypot(self.m)
    }
}

/// Full-quadrant angle of `(u, v)` in `(−π, π]`.
pub fn polar_angle(u: f64, v: f64) -> Result<f64> {
    if u == 0.0 && v == 0.0 {
        return Err(GeometryError::DegenerateOrigin);
    }
    let a = v.atan2(u);
    // atan2(-0, -1) yields -π
    Ok(if a == -PI { PI } else { a })
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}
