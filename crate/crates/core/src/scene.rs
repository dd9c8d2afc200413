//! Scene documents: parsing, validation and echo.
//!
//! A scene is a JSON object with a `focal` block and an `entities` array;
//! `schemas/scene.schema.json` describes it formally.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::area::{AnnularSector, CylindricalPatch, VerticalRect};
use crate::geometry::{ParaboloidModel, Point3, DEFAULT_TOL_ABS_PER_F, DEFAULT_TOL_REL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid entity '{id}': {constraint}")]
    Validation { id: String, constraint: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Radians,
    Degrees,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocalDoc {
    pub f: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CornersDoc {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
    pub d: [f64; 3],
}

/// One entity as written in the document; angles in the document's unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntityDoc {
    Point { id: String, u: f64, v: f64, w: f64 },
    Segment { id: String, a: [f64; 3], b: [f64; 3] },
    VerticalRect { id: String, corners: CornersDoc },
    CylindricalPatch { id: String, r: f64, w_top: f64, w_bottom: f64, phi_from: f64, phi_to: f64 },
    AnnularSector { id: String, r_inner: f64, r_outer: f64, phi_from: f64, phi_to: f64 },
}

impl EntityDoc {
    pub fn id(&self) -> &str {
        match self {
            EntityDoc::Point { id, .. }
            | EntityDoc::Segment { id, .. }
            | EntityDoc::VerticalRect { id, .. }
            | EntityDoc::CylindricalPatch { id, .. }
            | EntityDoc::AnnularSector { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focal: Option<FocalDoc>,
    #[serde(default)]
    pub angle_unit: AngleUnit,
    #[serde(default)]
    pub entities: Vec<EntityDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntityKind {
    Point(Point3),
    Segment(Point3, Point3),
    VerticalRect(VerticalRect),
    CylindricalPatch(CylindricalPatch),
    AnnularSector(AnnularSector),
}

impl EntityKind {
    pub fn type_name(&self) -> &'static str {
        match self {
            EntityKind::Point(_) => "point",
            EntityKind::Segment(..) => "segment",
            EntityKind::VerticalRect(_) => "vertical_rect",
            EntityKind::CylindricalPatch(_) => "cylindrical_patch",
            EntityKind::AnnularSector(_) => "annular_sector",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub id: String,
    pub kind: EntityKind,
}

/// A validated scene. Entities are in radians whatever the document's unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub model: ParaboloidModel,
    pub entities: Vec<Entity>,
    document: SceneDocument,
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    Scene::from_document(parse_document(text)?)
}

pub fn parse_document(text: &str) -> Result<SceneDocument, SceneError> {
    serde_json::from_str(text).map_err(|e| SceneError::Parse { line: e.line(), message: e.to_string() })
}

fn invalid(id: &str, constraint: impl std::fmt::Display) -> SceneError {
    SceneError::Validation { id: id.to_string(), constraint: constraint.to_string() }
}

impl Scene {
    pub fn from_document(document: SceneDocument) -> Result<Self, SceneError> {
        let focal = document.focal.ok_or_else(|| invalid("focal", "the focal block is required"))?;
        let tol = focal.tolerances.unwrap_or(Tolerances { rel: None, abs: None });
        let model = ParaboloidModel::with_tolerances(
            focal.f,
            tol.rel.unwrap_or(DEFAULT_TOL_REL),
            tol.abs.unwrap_or(DEFAULT_TOL_ABS_PER_F * focal.f),
        )
        .map_err(|e| invalid("focal", e))?;

        let angle = |x: f64| match document.angle_unit {
            AngleUnit::Radians => x,
            AngleUnit::Degrees => x.to_radians(),
        };
        let mut seen = HashSet::new();
        let mut entities = Vec::with_capacity(document.entities.len());
        for doc in &document.entities {
            let id = doc.id();
            if id.is_empty() {
                return Err(invalid(id, "id must not be empty"));
            }
            if !seen.insert(id) {
                return Err(invalid(id, "duplicate id"));
            }
            let kind = match *doc {
                EntityDoc::Point { u, v, w, .. } => EntityKind::Point(Point3::new(u, v, w)),
                EntityDoc::Segment { a, b, .. } => EntityKind::Segment(a.into(), b.into()),
                EntityDoc::VerticalRect { corners: c, .. } => EntityKind::VerticalRect(
                    VerticalRect::new(c.a.into(), c.b.into(), c.c.into(), c.d.into()).map_err(|e| invalid(id, e))?,
                ),
                EntityDoc::CylindricalPatch { r, w_top, w_bottom, phi_from, phi_to, .. } => {
                    let p = CylindricalPatch { r, w_top, w_bottom, phi_from: angle(phi_from), phi_to: angle(phi_to) };
                    p.validate().map_err(|e| invalid(id, e))?;
                    EntityKind::CylindricalPatch(p)
                }
                EntityDoc::AnnularSector { r_inner, r_outer, phi_from, phi_to, .. } => {
                    let s = AnnularSector { r_inner, r_outer, phi_from: angle(phi_from), phi_to: angle(phi_to) };
                    s.validate().map_err(|e| invalid(id, e))?;
                    EntityKind::AnnularSector(s)
                }
            };
            entities.push(Entity { id: id.to_string(), kind });
        }
        Ok(Self { model, entities, document })
    }

    pub fn document(&self) -> &SceneDocument {
        &self.document
    }

    pub fn angle_unit(&self) -> AngleUnit {
        self.document.angle_unit
    }

    /// The scene as a document that parses back to an equal scene.
    pub fn echo(&self) -> String {
        serde_json::to_string_pretty(&self.document).expect("scene documents always serialize")
    }
}
