//! JSON instance documents.
//!
//! ```json
//! {
//!   "workspace": [["0", "0"], ["100", "0"], ["100", "100"], ["0", "100"]],
//!   "sets": [[{"point": ["20", "50"]}], [{"polygon": [["70", "40"], ["80", "40"], ["75", "50"]]}]],
//!   "obstacles": []
//! }
//! ```
//!
//! Coordinates are strings holding decimals or `p/q` fractions, read exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate, Instance, Shape, Violation};
use crate::geometry::{GeometryError, Point, Polygon};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("parse error in {field}: {source}")]
    Field {
        field: String,
        #[source]
        source: GeometryError,
    },
    #[error("invalid instance: {}", .0.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl From<serde_json::Error> for InstanceError {
    fn from(e: serde_json::Error) -> Self {
        InstanceError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

pub(crate) type CoordPair = [String; 2];

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub(crate) enum ShapeDoc {
    Point(CoordPair),
    Polygon(Vec<CoordPair>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    workspace: Vec<CoordPair>,
    sets: Vec<Vec<ShapeDoc>>,
    #[serde(default)]
    obstacles: Vec<ShapeDoc>,
}

pub(crate) fn point_from_doc(pair: &CoordPair, field: &str) -> Result<Point, InstanceError> {
    Point::parse(&pair[0], &pair[1]).map_err(|source| InstanceError::Field { field: field.to_string(), source })
}

pub(crate) fn polygon_from_doc(pts: &[CoordPair], field: &str) -> Result<Polygon, InstanceError> {
    let vertices = pts
        .iter()
        .enumerate()
        .map(|(i, p)| point_from_doc(p, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Polygon::new(vertices).map_err(|source| InstanceError::Field { field: field.to_string(), source })
}

fn shape_from_doc(doc: &ShapeDoc, field: &str) -> Result<Shape, InstanceError> {
    match doc {
        ShapeDoc::Point(p) => Ok(Shape::Point(point_from_doc(p, &format!("{field}.point"))?)),
        ShapeDoc::Polygon(pts) => Ok(Shape::Polygon(polygon_from_doc(pts, &format!("{field}.polygon"))?)),
    }
}

fn shape_to_doc(s: &Shape) -> ShapeDoc {
    match s {
        Shape::Point(p) => ShapeDoc::Point(p.to_strings()),
        Shape::Polygon(poly) => ShapeDoc::Polygon(poly.vertices().iter().map(Point::to_strings).collect()),
    }
}

/// Parses a document without checking instance invariants.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let workspace = polygon_from_doc(&doc.workspace, "workspace")?;
    let sets = doc
        .sets
        .iter()
        .enumerate()
        .map(|(i, set)| {
            set.iter().enumerate().map(|(j, s)| shape_from_doc(s, &format!("sets[{i}][{j}]"))).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let obstacles = doc
        .obstacles
        .iter()
        .enumerate()
        .map(|(i, s)| shape_from_doc(s, &format!("obstacles[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Instance { workspace, sets, obstacles })
}

/// Parses and validates.
pub fn read_instance(text: &str) -> Result<Instance, InstanceError> {
    let inst = parse_instance(text)?;
    let violations = validate(&inst);
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(InstanceError::Invalid(violations))
    }
}

pub fn write_instance(inst: &Instance) -> String {
    let doc = InstanceDoc {
        workspace: inst.workspace.vertices().iter().map(Point::to_strings).collect(),
        sets: inst.sets.iter().map(|set| set.iter().map(shape_to_doc).collect()).collect(),
        obstacles: inst.obstacles.iter().map(shape_to_doc).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance serialization cannot fail");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "workspace": [["0","0"],["1","0"],["1","1"],["0","1"]],
        "sets": [[{"point": ["0.25","0.5"]}], [{"point": ["0.75","0.5"]}]]
    }"#;

    #[test]
    fn reads_minimal_document() {
        let inst = read_instance(MINIMAL).unwrap();
        assert_eq!(inst.num_sets(), 2);
        assert!(inst.obstacles.is_empty());
    }

    #[test]
    fn malformed_coordinate_is_parse_error_with_field() {
        let text = MINIMAL.replace("0.25", "1.2.3");
        match read_instance(&text) {
            Err(InstanceError::Field { field, .. }) => assert_eq!(field, "sets[0][0].point"),
            other => panic!("expected field error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = read_instance("{\n  \"workspace\": [,\n}").unwrap_err();
        assert!(matches!(err, InstanceError::Json { line: 2, .. }), "{err}");
    }

    #[test]
    fn invalid_instance_is_rejected() {
        let text = MINIMAL.replace("0.25", "0");
        assert!(matches!(read_instance(&text), Err(InstanceError::Invalid(v)) if v.len() == 1));
    }

    #[test]
    fn write_then_read_is_identity() {
        let inst = read_instance(MINIMAL).unwrap();
        let text = write_instance(&inst);
        assert_eq!(read_instance(&text).unwrap(), inst);
        assert_eq!(write_instance(&read_instance(&text).unwrap()), text);
    }
}
