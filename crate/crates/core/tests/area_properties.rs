use std::f64::consts::{FRAC_PI_2, PI};

use paraboloid_core::area::{
    annular_sector_area, paraboloid_mesh_area, paraboloid_patch_area_closed, vertical_rect_projected_area,
    vertical_rect_surface_mesh, AnnularSector, CylindricalPatch, MeshSpec, VerticalRect,
};
use paraboloid_core::{ParaboloidModel, Point3};
use proptest::prelude::*;

fn unit() -> ParaboloidModel {
    ParaboloidModel::new(1.0).unwrap()
}

#[test]
fn flat_limit_at_a_thousand_outer_radii() {
    for r_outer in [0.5, 2.0, 7.0] {
        let m = ParaboloidModel::new(1e3 * r_outer).unwrap();
        let spec = MeshSpec { refine_tol: 1e-6, ..MeshSpec::default() };
        let mesh = paraboloid_mesh_area(&m, 0.2 * r_outer, r_outer, 0.0, FRAC_PI_2, &spec).unwrap();
        let flat = annular_sector_area(r_outer, 0.2 * r_outer, FRAC_PI_2).unwrap();
        assert!((mesh.value - flat).abs() / flat <= 1e-6, "{} vs {flat}", mesh.value);
    }
}

#[test]
fn refinement_is_nondecreasing() {
    let m = ParaboloidModel::new(0.8).unwrap();
    let mut prev = 0.0;
    for rows in [2, 3, 5, 9, 17, 33, 65] {
        let spec = MeshSpec { rows, cols: rows, refine_tol: 1.0, max_refines: 0 };
        let a = paraboloid_mesh_area(&m, 0.4, 3.0, -1.0, 1.5, &spec).unwrap().value;
        assert!(a >= prev);
        prev = a;
    }
    assert!(prev < paraboloid_patch_area_closed(&m, 0.4, 3.0, 2.5).unwrap());
}

#[test]
fn surface_area_is_at_least_projected_area() {
    let m = unit();
    let rect = VerticalRect::new(
        Point3::new(2.0, 0.0, 1.0),
        Point3::new(0.0, 2.0, 1.0),
        Point3::new(0.0, 2.0, 0.0),
        Point3::new(2.0, 0.0, 0.0),
    )
    .unwrap();
    let projected = vertical_rect_projected_area(&m, &rect).unwrap();
    let (surface, _) = vertical_rect_surface_mesh(&m, &rect, &MeshSpec::default()).unwrap();
    assert!(surface >= projected.value);
}

#[test]
fn cylinder_patch_image_is_an_annular_sector() {
    // the perspective of a cylinder patch projects onto an annular sector
    // whose radii are the images of its top and bottom circles
    let m = unit();
    let patch = CylindricalPatch { r: 1.0, w_top: 1.0, w_bottom: 0.0, phi_from: 0.0, phi_to: FRAC_PI_2 };
    let areas = patch.areas(&m, &MeshSpec::default()).unwrap();
    let top = m.central_project(Point3::new(1.0, 0.0, 1.0)).unwrap().r();
    assert!((areas.image_radii[0] - top).abs() < 1e-14);
    assert!((areas.image_radii[1] - 2.0).abs() < 1e-14);
    assert!(areas.projected.within_bound() && areas.surface.within_bound() && areas.space.within_bound());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mesh_area_is_additive(r_in in 0f64..2.0, width in 0.1f64..3.0, phi_b in -PI..PI, span in 0.2f64..6.0,
                             cut in 0.1f64..0.9) {
        let m = unit();
        let spec = MeshSpec::default();
        let (r_out, phi_a) = (r_in + width, phi_b + span);
        let phi_c = phi_b + cut * span;
        let whole = paraboloid_mesh_area(&m, r_in, r_out, phi_b, phi_a, &spec).unwrap().value;
        let left = paraboloid_mesh_area(&m, r_in, r_out, phi_b, phi_c, &spec).unwrap().value;
        let right = paraboloid_mesh_area(&m, r_in, r_out, phi_c, phi_a, &spec).unwrap().value;
        prop_assert!((left + right - whole).abs() <= 2.0 * spec.refine_tol * whole);
    }

    #[test]
    fn area_operations_are_rotation_invariant(r_in in 0f64..2.0, width in 0.1f64..3.0, phi in -PI..PI,
                                              span in 0.2f64..6.0, turn in -PI..PI) {
        let m = unit();
        let spec = MeshSpec::default();
        let s = AnnularSector { r_inner: r_in, r_outer: r_in + width, phi_from: phi, phi_to: phi + span };
        let t = AnnularSector { phi_from: phi + turn, phi_to: phi + span + turn, ..s };
        let (a, b) = (s.areas(&m, &spec).unwrap(), t.areas(&m, &spec).unwrap());
        prop_assert!((a.projected.value - b.projected.value).abs() <= 1e-9 * a.projected.value);
        prop_assert!((a.surface.value - b.surface.value).abs() <= 1e-9 * a.surface.value);
    }

    #[test]
    fn rect_corpus_matches_green(dist in 0.5f64..10.0, v0 in -2f64..1.0, width in 0.05f64..2.0,
                                 w0 in -4f64..2.0, height in 0.1f64..4.0, phi in -PI..PI) {
        let m = unit();
        let c = |v: f64, w: f64| Point3::new(dist, v * dist, w).rotate_about_w(phi);
        let rect = VerticalRect::new(c(v0, w0 + height), c(v0 + width, w0 + height), c(v0 + width, w0), c(v0, w0)).unwrap();
        let r = vertical_rect_projected_area(&m, &rect).unwrap();
        prop_assert!(r.rel_residual <= 1e-6, "{:?}", r);
    }
}
