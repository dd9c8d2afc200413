//! Metric reports: per-entity results with their oracle residuals, and the
//! JSON and CSV encodings.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::area::{
    vertical_rect_projected_area, vertical_rect_surface_area, AreaResult, MeshSpec, MonteCarloOptions,
};
use crate::conics::SectionShape;
use crate::error::GeometryError;
use crate::geometry::ParaboloidModel;
use crate::length::{line_image_lengths, ArcResult, LengthOptions};
use crate::projection::ray_hit_bisect;
use crate::scene::{AngleUnit, Entity, EntityKind, Scene};

/// Residual bound for perspectives against the bisection oracle, and for the
/// identities checked on a section.
pub const POINT_BOUND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Project,
    Classify,
    Length,
    Area,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Degenerate,
    NotApplicable,
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Degenerate => "degenerate",
            Status::NotApplicable => "not-applicable",
            Status::Error => "error",
        }
    }
}

/// Computation settings that are not part of the scene.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunSettings {
    pub mesh: MeshSpec,
    pub monte_carlo: MonteCarloOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceMeta {
    pub rel: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub f: f64,
    pub tolerances: ToleranceMeta,
    pub angle_unit: AngleUnit,
    pub mesh: MeshSpec,
    pub seed: u64,
    pub mc_samples: u64,
}

/// One scalar result, with its oracle when it has one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    pub pass: bool,
}

impl Quantity {
    fn value(name: &str, analytic: f64) -> Self {
        Self { name: name.into(), analytic, oracle: None, rel_residual: None, bound: None, std_error: None, pass: true }
    }

    fn checked(name: &str, analytic: f64, oracle: f64, bound: f64) -> Self {
        let rel = if analytic == oracle { 0.0 } else { (analytic - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE) };
        Self {
            name: name.into(),
            analytic,
            oracle: Some(oracle),
            rel_residual: Some(rel),
            bound: Some(bound),
            std_error: None,
            pass: rel <= bound,
        }
    }

    fn arc(name: &str, r: &ArcResult) -> Self {
        Self {
            name: name.into(),
            analytic: r.analytic,
            oracle: Some(r.oracle),
            rel_residual: Some(r.rel_residual),
            bound: Some(r.bound),
            std_error: None,
            pass: r.within_bound(),
        }
    }

    fn area(name: &str, r: &AreaResult) -> Self {
        Self {
            name: name.into(),
            analytic: r.value,
            oracle: Some(r.oracle),
            rel_residual: Some(r.rel_residual),
            bound: Some(r.bound),
            std_error: r.std_error,
            pass: r.within_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityReport {
    pub id: String,
    pub entity: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    pub quantities: Vec<Quantity>,
    /// Structured results keyed by command.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<&'static str, Value>,
}

impl EntityReport {
    pub fn passed(&self) -> bool {
        self.status != Status::Error && self.quantities.iter().all(|q| q.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub metadata: Metadata,
    pub entities: Vec<EntityReport>,
}

impl MetricReport {
    /// True when every entity computed without error and every residual is
    /// within its bound. Degenerate entities do not count as failures.
    pub fn passed(&self) -> bool {
        self.entities.iter().all(EntityReport::passed)
    }
}

fn is_degeneracy(e: &GeometryError) -> bool {
    matches!(
        e,
        GeometryError::DegenerateOrigin
            | GeometryError::DegenerateOnAxis { .. }
            | GeometryError::DegenerateLineThroughFocus
            | GeometryError::UnboundedImage
            | GeometryError::NotElliptic { .. }
            | GeometryError::RegionInverted(_)
    )
}

/// What one command produced for one entity.
struct Partial {
    key: &'static str,
    quantities: Vec<Quantity>,
    detail: Value,
}

type Step = Option<Result<Partial, GeometryError>>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results always serialize")
}

fn project(model: &ParaboloidModel, kind: &EntityKind) -> Step {
    let EntityKind::Point(p) = *kind else { return None };
    Some(model.double_project(p).map(|b| {
        let a1_oracle = ray_hit_bisect(model.f(), p);
        let a2_oracle = ray_hit_bisect(model.f(), model.lift_to_director(b.a_prime));
        Partial {
            key: "project",
            quantities: vec![
                Quantity::checked("A1_distance", b.a1.norm(), a1_oracle.norm(), POINT_BOUND),
                Quantity::checked("A2_distance", b.a2.norm(), a2_oracle.norm(), POINT_BOUND),
                Quantity::value("A1_surface_residual", model.surface_rel_residual(b.a1)),
                Quantity::value("A2_surface_residual", model.surface_rel_residual(b.a2)),
            ],
            detail: to_value(&b),
        }
    }))
}

fn classify(model: &ParaboloidModel, kind: &EntityKind) -> Step {
    let EntityKind::Segment(a, b) = *kind else { return None };
    let run = || {
        let plane = model.plane_through_focus(a, b)?;
        let section = model.classify_section(plane);
        let mut quantities = Vec::new();
        let mut detail = json!({ "kind": section.kind(), "plane": plane });
        if section.projected_radius.is_finite() {
            // the τ-image of A lies on the projected circle
            let a1 = model.central_project(a)?.horizontal();
            let c = section.projected_center;
            let dist = a1.distance(c);
            quantities.push(Quantity::checked("projected_radius", section.projected_radius, dist, POINT_BOUND));
            detail["projected_center"] = to_value(&c);
            detail["projected_radius"] = to_value(&section.projected_radius);
        }
        match section.shape {
            SectionShape::Ellipse(e) => {
                quantities.push(Quantity::value("semi_major", e.a));
                quantities.push(Quantity::checked("semi_minor", e.b, (2.0 * model.f() * e.a).sqrt(), POINT_BOUND));
                detail["center"] = to_value(&e.center);
                detail["a"] = to_value(&e.a);
                detail["b"] = to_value(&e.b);
                detail["phi_oe"] = to_value(&e.phi_oe);
            }
            SectionShape::Circle { radius } => {
                detail["radius"] = to_value(&radius);
            }
            SectionShape::Parabola { phi } => {
                detail["phi"] = to_value(&phi);
            }
        }
        Ok(Partial { key: "classify", quantities, detail })
    };
    Some(run())
}

fn length(model: &ParaboloidModel, kind: &EntityKind) -> Step {
    let EntityKind::Segment(a, b) = *kind else { return None };
    Some(line_image_lengths(model, a, b, &LengthOptions::for_model(model)).map(|r| Partial {
        key: "length",
        quantities: vec![
            Quantity::value("L", r.l),
            Quantity::value("L_prime", r.l_prime),
            Quantity::arc("L1", &r.l1),
            Quantity::arc("L1_prime", &r.l1_prime),
            Quantity::arc("L2", &r.l2),
            Quantity::arc("L2_prime", &r.l2_prime),
        ],
        detail: to_value(&r),
    }))
}

fn area(model: &ParaboloidModel, kind: &EntityKind, settings: &RunSettings) -> Step {
    let run = || -> Result<Partial, GeometryError> {
        match kind {
            EntityKind::VerticalRect(rect) => {
                let projected = vertical_rect_projected_area(model, rect)?;
                let surface = vertical_rect_surface_area(model, rect, &settings.mesh, &settings.monte_carlo)?;
                Ok(Partial {
                    key: "area",
                    quantities: vec![Quantity::area("projected_area", &projected), Quantity::area("surface_area", &surface)],
                    detail: json!({ "projected_area": projected, "surface_area": surface }),
                })
            }
            EntityKind::CylindricalPatch(patch) => {
                let a = patch.areas(model, &settings.mesh)?;
                Ok(Partial {
                    key: "area",
                    quantities: vec![
                        Quantity::area("space_area", &a.space),
                        Quantity::area("projected_area", &a.projected),
                        Quantity::area("surface_area", &a.surface),
                    ],
                    detail: to_value(&a),
                })
            }
            EntityKind::AnnularSector(sector) => {
                let a = sector.areas(model, &settings.mesh)?;
                Ok(Partial {
                    key: "area",
                    quantities: vec![Quantity::area("projected_area", &a.projected), Quantity::area("surface_area", &a.surface)],
                    detail: to_value(&a),
                })
            }
            _ => unreachable!("filtered below"),
        }
    };
    match kind {
        EntityKind::Point(_) | EntityKind::Segment(..) => None,
        _ => Some(run()),
    }
}

fn entity_report(model: &ParaboloidModel, entity: &Entity, command: Command, settings: &RunSettings) -> EntityReport {
    let steps: Vec<Step> = match command {
        Command::Project => vec![project(model, &entity.kind)],
        Command::Classify => vec![classify(model, &entity.kind)],
        Command::Length => vec![length(model, &entity.kind)],
        Command::Area => vec![area(model, &entity.kind, settings)],
        Command::Validate => vec![
            project(model, &entity.kind),
            classify(model, &entity.kind),
            length(model, &entity.kind),
            area(model, &entity.kind, settings),
        ],
    };
    let mut report = EntityReport {
        id: entity.id.clone(),
        entity: entity.kind.type_name(),
        status: Status::NotApplicable,
        diagnostic: None,
        quantities: Vec::new(),
        details: BTreeMap::new(),
    };
    let mut diagnostics = Vec::new();
    for step in steps.into_iter().flatten() {
        match step {
            Ok(p) => {
                if report.status == Status::NotApplicable {
                    report.status = Status::Ok;
                }
                report.quantities.extend(p.quantities);
                report.details.insert(p.key, p.detail);
            }
            Err(e) => {
                let status = if is_degeneracy(&e) { Status::Degenerate } else { Status::Error };
                if report.status != Status::Error {
                    report.status = status;
                }
                let msg = e.to_string();
                if !diagnostics.contains(&msg) {
                    diagnostics.push(msg);
                }
            }
        }
    }
    if report.status == Status::NotApplicable {
        diagnostics.push(format!("{} entities have no {command:?} results", entity.kind.type_name()).to_lowercase());
    }
    if !diagnostics.is_empty() {
        report.diagnostic = Some(diagnostics.join("; "));
    }
    report
}

/// Runs `command` over every entity of `scene`; entities are computed in
/// parallel and reported in input order.
pub fn build_report(scene: &Scene, command: Command, settings: &RunSettings) -> MetricReport {
    let model = scene.model;
    let entities = scene.entities.par_iter().map(|e| entity_report(&model, e, command, settings)).collect();
    MetricReport { metadata: metadata(scene, command, settings), entities }
}

fn metadata(scene: &Scene, command: Command, settings: &RunSettings) -> Metadata {
    Metadata {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        f: scene.model.f(),
        tolerances: ToleranceMeta { rel: scene.model.tol_rel(), abs: scene.model.tol_abs() },
        angle_unit: scene.angle_unit(),
        mesh: settings.mesh,
        seed: settings.monte_carlo.seed,
        mc_samples: settings.monte_carlo.samples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub const CSV_COLUMNS: [&str; 9] = ["id", "entity", "quantity", "analytic", "oracle", "rel_residual", "bound", "status", "diagnostic"];

/// Shortest representation that parses back to the same value.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn emit_report(report: &MetricReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_COLUMNS).expect("in-memory write");
            for e in &report.entities {
                let diag = e.diagnostic.clone().unwrap_or_default();
                if e.quantities.is_empty() {
                    w.write_record([e.id.as_str(), e.entity, "", "", "", "", "", e.status.as_str(), diag.as_str()])
                        .expect("in-memory write");
                }
                for q in &e.quantities {
                    w.write_record([
                        e.id.clone(),
                        e.entity.to_string(),
                        q.name.clone(),
                        num(q.analytic),
                        opt_num(q.oracle),
                        opt_num(q.rel_residual),
                        opt_num(q.bound),
                        e.status.as_str().to_string(),
                        diag.clone(),
                    ])
                    .expect("in-memory write");
                }
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    fn scene(entities: &str) -> Scene {
        parse_scene(&format!(r#"{{"focal": {{"f": 1}}, "entities": [{entities}]}}"#)).unwrap()
    }

    #[test]
    fn empty_report_has_metadata_only() {
        let r = build_report(&scene(""), Command::Validate, &RunSettings::default());
        let v: Value = serde_json::from_str(&emit_report(&r, Format::Json)).unwrap();
        assert_eq!(v["entities"], json!([]));
        assert_eq!(v["metadata"]["f"], json!(1.0));
        assert_eq!(emit_report(&r, Format::Csv).trim(), CSV_COLUMNS.join(","));
    }

    #[test]
    fn horizontal_segment_quarter_circle() {
        let s = scene(r#"{"type": "segment", "id": "s", "a": [2, 0, 0], "b": [0, 2, 0]}"#);
        let r = build_report(&s, Command::Length, &RunSettings::default());
        let l1 = r.entities[0].quantities.iter().find(|q| q.name == "L1").unwrap();
        assert!((l1.analytic - std::f64::consts::PI).abs() < 1e-12 && l1.pass);
    }

    #[test]
    fn degeneracies_are_in_band() {
        let s = scene(
            r#"{"type": "point", "id": "axis", "u": 0, "v": 0, "w": 3},
               {"type": "segment", "id": "radial", "a": [1, 0, 0], "b": [2, 0, 0]},
               {"type": "point", "id": "fine", "u": 1, "v": 2, "w": 3}"#,
        );
        let r = build_report(&s, Command::Project, &RunSettings::default());
        assert_eq!(r.entities[0].status, Status::Degenerate);
        assert_eq!(r.entities[1].status, Status::NotApplicable);
        assert_eq!(r.entities[2].status, Status::Ok);
        assert!(r.passed());
        let v = build_report(&s, Command::Validate, &RunSettings::default());
        assert_eq!(v.entities[1].status, Status::Degenerate, "{:?}", v.entities[1]);
    }

    #[test]
    fn csv_numbers_round_trip() {
        let s = scene(r#"{"type": "point", "id": "p", "u": 0.1, "v": 1e-7, "w": -3.3}"#);
        let r = build_report(&s, Command::Project, &RunSettings::default());
        let csv = emit_report(&r, Format::Csv);
        let mut rd = csv::Reader::from_reader(csv.as_bytes());
        for (row, q) in rd.records().zip(&r.entities[0].quantities) {
            assert_eq!(row.unwrap()[3].parse::<f64>().unwrap(), q.analytic);
        }
    }
}
