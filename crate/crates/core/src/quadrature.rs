//! Adaptive Simpson quadrature and compensated summation.

use crate::error::{GeometryError, Result};
use crate::geometry::Point3;

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;

/// Number of equal panels the interval is cut into before adapting.
const INITIAL_PANELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: DEFAULT_REL_TOL, max_depth: MAX_DEPTH }
    }
}

impl QuadratureOptions {
    /// Default options with the absolute floor scaled to the length unit `f`.
    pub fn for_scale(f: f64) -> Self {
        Self { abs_tol: 1e-12 * f, ..Self::default() }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[inline]
fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

struct Adaptive<'a, F> {
    f: &'a F,
    max_depth: u32,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn step(&self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        // below this the difference is rounding noise
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if delta.abs() <= 15.0 * eps || delta.abs() <= floor {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth || m <= a || m >= b {
            return Err(GeometryError::NoConvergence(format!(
                "adaptive Simpson exhausted depth {} near t = {m}",
                self.max_depth
            )));
        }
        Ok(self.step(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)?
            + self.step(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1)?)
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(GeometryError::InvalidArgument("integration limits must be finite".into()));
    }
    let h = (b - a) / INITIAL_PANELS as f64;
    let xs: Vec<f64> = (0..=2 * INITIAL_PANELS).map(|i| a + 0.5 * h * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(GeometryError::InvalidArgument("integrand is not finite on the interval".into()));
    }
    let panels: Vec<f64> = (0..INITIAL_PANELS)
        .map(|i| simpson(ys[2 * i], ys[2 * i + 1], ys[2 * i + 2], h))
        .collect();
    let estimate: f64 = panels.iter().sum();
    let eps = opts.abs_tol.max(opts.rel_tol * estimate.abs()) / INITIAL_PANELS as f64;
    let adaptive = Adaptive { f: &f, max_depth: opts.max_depth };
    let mut sum = NeumaierSum::default();
    for (i, whole) in panels.into_iter().enumerate() {
        let (x0, x1) = (xs[2 * i], xs[2 * i + 2]);
        sum.add(adaptive.step(x0, x1, ys[2 * i], ys[2 * i + 1], ys[2 * i + 2], whole, eps, 0)?);
    }
    Ok(sum.total())
}

/// A differentiable path in space.
pub trait ParametricPath {
    fn point(&self, t: f64) -> Point3;

    /// Velocity at `t`. Defaults to a five-point central difference.
    fn velocity(&self, t: f64) -> Point3 {
        let h = 1e-3 * (1.0 + t.abs());
        let p = |s: f64| self.point(t + s * h);
        (p(-2.0) - p(2.0) + (p(1.0) - p(-1.0)) * 8.0) * (1.0 / (12.0 * h))
    }
}

/// A path given by a pair of closures for position and velocity.
pub struct FnPath<P, V> {
    pub point: P,
    pub velocity: V,
}

impl<P: Fn(f64) -> Point3, V: Fn(f64) -> Point3> ParametricPath for FnPath<P, V> {
    fn point(&self, t: f64) -> Point3 {
        (self.point)(t)
    }

    fn velocity(&self, t: f64) -> Point3 {
        (self.velocity)(t)
    }
}

/// `∫ ‖path′(t)‖ dt` over `[t1, t2]` by adaptive Simpson, `t1 ≤ t2`.
pub fn arc_length_quadrature<C: ParametricPath + ?Sized>(
    path: &C,
    t1: f64,
    t2: f64,
    opts: QuadratureOptions,
) -> Result<f64> {
    if t2 < t1 {
        return Err(GeometryError::InvalidArgument(format!("expected t1 <= t2, got [{t1}, {t2}]")));
    }
    integrate(|t| path.velocity(t).norm(), t1, t2, opts)
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}
