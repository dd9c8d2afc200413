//! The double projection chain: central projection from the focus onto the
//! paraboloid, orthogonal projection onto τ, and the perspective of the
//! orthogonal projection.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::geometry::{ParaboloidModel, Point2, Point3};

/// The five images of one space point `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionBundle {
    /// Perspective of `A` on the surface (A₁).
    pub a1: Point3,
    /// Orthogonal projection of `A` onto τ (A′).
    pub a_prime: Point2,
    /// Orthogonal projection of A₁ onto τ (A′₁).
    pub a1_prime: Point2,
    /// Perspective of A′ on the surface (A₂).
    pub a2: Point3,
    /// Orthogonal projection of A₂ onto τ (A′₂).
    pub a2_prime: Point2,
    /// Distance of `A` from the axis.
    pub r: f64,
}

/// Scale `t > 0` with `t·p` on the surface, for any `p` not on the
/// upper half of the axis.
///
/// Substituting `t·p` into the surface equation gives
/// `t = 2f(w + ρ)/r² = 2f/(ρ − w)` with `ρ = |p|`; the second form is used
/// for `w < 0` where the first cancels.
#[inline]
pub(crate) fn ray_scale(f: f64, p: Point3) -> f64 {
    let rho = p.norm();
    if p.w < 0.0 {
        2.0 * f / (rho - p.w)
    } else {
        let r2 = p.u * p.u + p.v * p.v;
        2.0 * f * (p.w + rho) / r2
    }
}

/// Derivative of `ray_scale(p + s·d)` with respect to `s`, at `s = 0`.
#[inline]
pub(crate) fn ray_scale_derivative(f: f64, p: Point3, d: Point3) -> f64 {
    let rho = p.norm();
    let denom = rho - p.w;
    let d_rho = p.dot(d) / rho;
    -2.0 * f * (d_rho - d.w) / (denom * denom)
}

/// Bisection on the surface residual along the ray; independent of the
/// closed form and used as its oracle.
pub(crate) fn ray_hit_bisect(f: f64, p: Point3) -> Point3 {
    let g = |s: f64| {
        let q = p * s;
        q.u * q.u + q.v * q.v - 4.0 * f * q.w - 4.0 * f * f
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    p * (0.5 * (lo + hi))
}

impl ParaboloidModel {
    fn check_off_axis(&self, r: f64) -> Result<()> {
        if r <= self.tol_abs() {
            return Err(GeometryError::DegenerateOnAxis { r });
        }
        Ok(())
    }

    /// Intersection of the ray from the focus through `a` with the surface.
    pub fn central_project(&self, a: Point3) -> Result<Point3> {
        self.check_off_axis(a.r())?;
        Ok(a * ray_scale(self.f(), a))
    }

    #[inline]
    pub fn ortho_to_director(&self, p: Point3) -> Point2 {
        p.horizontal()
    }

    /// Perspective A₂ of a director-plane point A′.
    pub fn second_perspective(&self, a_prime: Point2) -> Result<Point3> {
        self.central_project(self.lift_to_director(a_prime))
    }

    pub fn double_project(&self, a: Point3) -> Result<ProjectionBundle> {
        let a1 = self.central_project(a)?;
        let a_prime = self.ortho_to_director(a);
        let a2 = self.second_perspective(a_prime)?;
        Ok(ProjectionBundle {
            a1,
            a_prime,
            a1_prime: self.ortho_to_director(a1),
            a2,
            a2_prime: self.ortho_to_director(a2),
            r: a.r(),
        })
    }
}
