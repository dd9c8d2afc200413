//! Paraboloidal double projection of a catadioptric camera and its metric
//! properties: true lengths of projected lines and areas bounded by projected
//! curves, each paired with an independent numerical oracle.
//!
//! The surface is `u² + v² = 4f·w + 4f²` with its focus at the origin. A space
//! point is projected centrally from the focus onto the surface, and
//! orthogonally onto the director plane `w = −2f`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod area;
pub mod cli;
pub mod conics;
pub mod error;
pub mod geometry;
pub mod length;
pub mod projection;
pub mod quadrature;
pub mod report;
pub mod scene;

pub use area::{
    AnnularSector, AreaResult, CylindricalPatch, MeshSpec, MonteCarloEstimate, MonteCarloOptions, RectImage, VerticalRect,
};
pub use conics::{ConicKind, ConicSection, EllipseSection, LocalPoint, SectionShape};
pub use error::{GeometryError, Result};
pub use geometry::{polar_angle, FocalPlane, ParaboloidModel, Point2, Point3};
pub use length::{line_image_lengths, ArcResult, LengthOptions, LineImageLengths};
pub use projection::ProjectionBundle;
pub use report::{build_report, emit_report, Command, Format, MetricReport, RunSettings};
pub use scene::{parse_scene, Scene, SceneError};
