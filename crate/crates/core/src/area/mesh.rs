//! Polar finite-element meshes lifted onto the surface.

use rayon::prelude::*;

use super::quad_patch_area;
use crate::geometry::{ParaboloidModel, Point3};
use crate::quadrature::NeumaierSum;

/// Surface area of the lift of a curvilinear polar mesh.
///
/// Node `(i, j)` sits at azimuth `θ_j = theta0 + j·Δθ` and radius
/// `inner(θ_j) + i/(rows − 1)·(outer(θ_j) − inner(θ_j))`. Cell rows are
/// summed in parallel and combined in row order, so the result does not
/// depend on the thread count.
pub fn mapped_mesh_area<I, O>(
    model: &ParaboloidModel,
    theta0: f64,
    theta1: f64,
    inner: I,
    outer: O,
    rows: usize,
    cols: usize,
) -> f64
where
    I: Fn(f64) -> f64,
    O: Fn(f64) -> f64,
{
    assert!(rows >= 2 && cols >= 2, "mesh needs at least 2x2 nodes");
    let d_theta = (theta1 - theta0) / (cols - 1) as f64;
    let columns: Vec<(f64, f64, f64, f64)> = (0..cols)
        .map(|j| {
            let theta = theta0 + j as f64 * d_theta;
            let (s, c) = theta.sin_cos();
            let r0 = inner(theta);
            (c, s, r0, outer(theta) - r0)
        })
        .collect();
    let f = model.f();
    let node = |i: usize, j: usize| {
        let (c, s, r0, span) = columns[j];
        let r = r0 + span * (i as f64 / (rows - 1) as f64);
        let (u, v) = (r * c, r * s);
        Point3::new(u, v, (r * r - 4.0 * f * f) / (4.0 * f))
    };
    let row_sums: Vec<f64> = (0..rows - 1)
        .into_par_iter()
        .map(|i| {
            (0..cols - 1)
                .map(|j| quad_patch_area(node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)))
                .collect::<NeumaierSum>()
                .total()
        })
        .collect();
    row_sums.into_iter().collect::<NeumaierSum>().total()
}

/// Mesh area above the annular sector `[r_inner, r_outer] × [phi_b, phi_a]`
/// at a fixed resolution, with `Δr = (r_outer − r_inner)/(rows − 1)` and
/// `Δφ = (phi_a − phi_b)/(cols − 1)`.
pub fn polar_mesh_area(
    model: &ParaboloidModel,
    r_inner: f64,
    r_outer: f64,
    phi_b: f64,
    phi_a: f64,
    rows: usize,
    cols: usize,
) -> f64 {
    mapped_mesh_area(model, phi_b, phi_a, |_| r_inner, |_| r_outer, rows, cols)
}
