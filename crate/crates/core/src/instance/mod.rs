//! Problem instances: a workspace polygon, `k` sets of objects to separate,
//! and obstacles. Objects and obstacles are points or simple polygons.

mod generate;
mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{point_in_polygon, segment_intersection, BBox, Intersection, Location, Point, Polygon};

pub use generate::{generate, GenKind, GenSpec, GenerationError};
pub use io::{parse_instance, read_instance, write_instance, InstanceError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Point(Point),
    Polygon(Polygon),
}

impl Shape {
    pub fn as_polygon(&self) -> Option<&Polygon> {
        match self {
            Shape::Polygon(p) => Some(p),
            Shape::Point(_) => None,
        }
    }

    pub fn as_point(&self) -> Option<&Point> {
        match self {
            Shape::Point(p) => Some(p),
            Shape::Polygon(_) => None,
        }
    }

    pub fn bbox(&self) -> BBox {
        match self {
            Shape::Point(p) => BBox::of_points([p]),
            Shape::Polygon(poly) => poly.bbox().clone(),
        }
    }

    /// Anchor vertices: the point itself or the polygon's vertices.
    pub fn vertices(&self) -> &[Point] {
        match self {
            Shape::Point(p) => std::slice::from_ref(p),
            Shape::Polygon(poly) => poly.vertices(),
        }
    }
}

/// Names one object or obstacle of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeRef {
    Object { set: usize, index: usize },
    Obstacle { index: usize },
}

impl ShapeRef {
    pub fn class(&self) -> Option<usize> {
        match self {
            ShapeRef::Object { set, .. } => Some(*set),
            ShapeRef::Obstacle { .. } => None,
        }
    }
}

impl fmt::Display for ShapeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeRef::Object { set, index } => write!(f, "object {index} of set {set}"),
            ShapeRef::Obstacle { index } => write!(f, "obstacle {index}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub workspace: Polygon,
    pub sets: Vec<Vec<Shape>>,
    pub obstacles: Vec<Shape>,
}

impl Instance {
    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn shape(&self, r: ShapeRef) -> &Shape {
        match r {
            ShapeRef::Object { set, index } => &self.sets[set][index],
            ShapeRef::Obstacle { index } => &self.obstacles[index],
        }
    }

    /// Every object then every obstacle, in a fixed order.
    pub fn shapes(&self) -> impl Iterator<Item = (ShapeRef, &Shape)> {
        let objects = self
            .sets
            .iter()
            .enumerate()
            .flat_map(|(set, objs)| objs.iter().enumerate().map(move |(index, s)| (ShapeRef::Object { set, index }, s)));
        let obstacles = self.obstacles.iter().enumerate().map(|(index, s)| (ShapeRef::Obstacle { index }, s));
        objects.chain(obstacles)
    }

    pub fn polygons(&self) -> impl Iterator<Item = (ShapeRef, &Polygon)> {
        self.shapes().filter_map(|(r, s)| s.as_polygon().map(|p| (r, p)))
    }

    /// True iff `p` lies in the open interior of some polygonal shape.
    pub fn inside_some_shape(&self, p: &Point) -> bool {
        self.polygons().any(|(_, poly)| point_in_polygon(p, poly) == Location::Inside)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NoSets,
    Containment,
    Overlap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub shapes: Vec<ShapeRef>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn role(r: &ShapeRef) -> &'static str {
    match r {
        ShapeRef::Object { .. } => "object",
        ShapeRef::Obstacle { .. } => "obstacle",
    }
}

/// Lists every broken instance invariant; empty iff the instance is valid.
pub fn validate(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if inst.sets.is_empty() {
        out.push(Violation { kind: ViolationKind::NoSets, shapes: vec![], message: "instance has no object sets".into() });
    }
    let shapes: Vec<(ShapeRef, &Shape)> = inst.shapes().collect();
    for (r, s) in &shapes {
        if !strictly_inside(s, &inst.workspace) {
            out.push(Violation {
                kind: ViolationKind::Containment,
                shapes: vec![*r],
                message: format!("containment: {r} is not strictly inside the workspace"),
            });
        }
    }
    for i in 0..shapes.len() {
        for j in (i + 1)..shapes.len() {
            let (ra, sa) = shapes[i];
            let (rb, sb) = shapes[j];
            if shapes_touch(sa, sb) {
                out.push(Violation {
                    kind: ViolationKind::Overlap,
                    shapes: vec![ra, rb],
                    message: format!("{}/{} overlap: {ra} and {rb} intersect", role(&ra), role(&rb)),
                });
            }
        }
    }
    out
}

fn strictly_inside(s: &Shape, ws: &Polygon) -> bool {
    match s {
        Shape::Point(p) => point_in_polygon(p, ws) == Location::Inside,
        Shape::Polygon(poly) => {
            poly.vertices().iter().all(|v| point_in_polygon(v, ws) == Location::Inside)
                && poly.edges().all(|e| ws.edges().all(|w| segment_intersection(&e, &w) == Intersection::Empty))
        }
    }
}

/// Closed-shape intersection test: touching counts.
pub(crate) fn shapes_touch(a: &Shape, b: &Shape) -> bool {
    if !a.bbox().intersects(&b.bbox()) {
        return false;
    }
    match (a, b) {
        (Shape::Point(p), Shape::Point(q)) => p == q,
        (Shape::Point(p), Shape::Polygon(poly)) | (Shape::Polygon(poly), Shape::Point(p)) => {
            point_in_polygon(p, poly) != Location::Outside
        }
        (Shape::Polygon(pa), Shape::Polygon(pb)) => {
            pa.edges().any(|ea| pb.edges().any(|eb| segment_intersection(&ea, &eb) != Intersection::Empty))
                || point_in_polygon(&pa.vertices()[0], pb) != Location::Outside
                || point_in_polygon(&pb.vertices()[0], pa) != Location::Outside
        }
    }
}
