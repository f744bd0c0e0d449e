//! Candidate barriers.
//!
//! Every candidate is a maximal segment of free space: it never enters the
//! open interior of a shape, stays inside the closed workspace, and each end
//! sits on a shape or workspace boundary. Two families are produced:
//!
//! * bitangents: the line through two anchors (object/obstacle vertices,
//!   point objects, point obstacles, reflex workspace vertices) where the
//!   line is locally tangent at both;
//! * sampled tangents: the line through one anchor in each of `r` fixed
//!   rational directions, again kept only when tangent.
//!
//! A point object lying on a candidate is treated as sitting strictly on
//! one side of it. Each side assignment is a separate candidate, so a line
//! through two point objects yields four.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{
    int, line_segment_params, orientation, point_in_polygon, segment_intersection, segment_intersects_interior, Coord,
    Intersection, Location, Orientation, Point, Polygon, Segment, Vector,
};
use crate::instance::{Instance, Shape, ShapeRef};

/// Which closed half-plane of a candidate's line an anchored shape is
/// assigned to. Measured against the direction from the candidate's
/// lexicographically smaller endpoint to its larger one: `Above` is left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Above,
    Below,
    On,
}

impl Side {
    fn from_orientation(o: Orientation) -> Side {
        match o {
            Orientation::Left => Side::Above,
            Orientation::Right => Side::Below,
            Orientation::Collinear => Side::On,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
            Side::On => Side::On,
        }
    }

    /// Side of `p` relative to the directed line `a → b`.
    pub fn of(a: &Point, b: &Point, p: &Point) -> Side {
        Side::from_orientation(orientation(a, b, p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorOwner {
    Shape(ShapeRef),
    Workspace,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tangency {
    pub anchor: Point,
    pub owner: AnchorOwner,
    pub side: Side,
}

impl Tangency {
    /// The point object pinned to one side of the candidate, if any.
    pub fn pinned_object(&self) -> Option<(usize, &Point, Side)> {
        match (self.owner, self.side) {
            (AnchorOwner::Shape(ShapeRef::Object { set, .. }), Side::Above | Side::Below) => Some((set, &self.anchor, self.side)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Bitangent,
    SampledTangent { resolution: u32, direction: u32 },
    /// Supplied directly by the caller.
    Manual,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateSegment {
    pub id: usize,
    /// Endpoints in lexicographic order; they also define the line direction.
    pub geometry: Segment,
    pub tangencies: Vec<Tangency>,
    pub source: CandidateSource,
}

impl CandidateSegment {
    pub fn manual(id: usize, geometry: Segment) -> Self {
        Self { id, geometry: geometry.canonical(), tangencies: Vec::new(), source: CandidateSource::Manual }
    }

    /// Side assigned to the point object at `p`, if the candidate pins one there.
    pub fn side_of_pinned(&self, p: &Point) -> Option<Side> {
        self.tangencies.iter().find_map(|t| t.pinned_object().filter(|(_, q, _)| *q == p).map(|(_, _, s)| s))
    }

    /// The pinned point objects with their sides, for the verifier.
    pub fn pins(&self) -> Vec<(Point, Side)> {
        self.tangencies.iter().filter_map(|t| t.pinned_object().map(|(_, p, s)| (p.clone(), s))).collect()
    }
}

#[derive(Debug, Clone)]
enum AnchorKind {
    PointObject,
    PointObstacle,
    /// Convex corner of an obstacle region; `prev`/`next` are its neighbors.
    Corner { prev: Point, next: Point },
}

#[derive(Debug, Clone)]
struct Anchor {
    point: Point,
    owner: AnchorOwner,
    kind: AnchorKind,
}

fn anchors(inst: &Instance, include_workspace: bool) -> Vec<Anchor> {
    let mut out = Vec::new();
    for (r, shape) in inst.shapes() {
        match shape {
            Shape::Point(p) => out.push(Anchor {
                point: p.clone(),
                owner: AnchorOwner::Shape(r),
                kind: match r {
                    ShapeRef::Object { .. } => AnchorKind::PointObject,
                    ShapeRef::Obstacle { .. } => AnchorKind::PointObstacle,
                },
            }),
            Shape::Polygon(poly) => {
                for (i, v) in poly.vertices().iter().enumerate() {
                    if poly.is_reflex(i) {
                        continue;
                    }
                    let (prev, next) = poly.neighbors(i);
                    out.push(Anchor {
                        point: v.clone(),
                        owner: AnchorOwner::Shape(r),
                        kind: AnchorKind::Corner { prev: prev.clone(), next: next.clone() },
                    });
                }
            }
        }
    }
    if include_workspace {
        let ws = &inst.workspace;
        for (i, v) in ws.vertices().iter().enumerate() {
            // Reflex workspace corners are convex corners of the exterior.
            if ws.is_reflex(i) {
                let (prev, next) = ws.neighbors(i);
                out.push(Anchor {
                    point: v.clone(),
                    owner: AnchorOwner::Workspace,
                    kind: AnchorKind::Corner { prev: prev.clone(), next: next.clone() },
                });
            }
        }
    }
    out
}

/// True iff the line through `at` with direction `dir` does not cut into
/// the region whose corner is anchored at `at`.
fn tangent_at(anchor: &Anchor, dir: &Vector) -> bool {
    match &anchor.kind {
        AnchorKind::PointObject | AnchorKind::PointObstacle => true,
        AnchorKind::Corner { prev, next } => {
            let ahead = anchor.point.offset(dir, &int(1));
            let a = orientation(&anchor.point, &ahead, prev);
            let b = orientation(&anchor.point, &ahead, next);
            !matches!((a, b), (Orientation::Left, Orientation::Right) | (Orientation::Right, Orientation::Left))
        }
    }
}

/// Quick reject: the whole box lies strictly on one side of the line.
fn line_misses_box(p: &Point, dir: &Vector, poly: &Polygon) -> bool {
    let b = poly.bbox();
    let ahead = p.offset(dir, &int(1));
    let corners = [
        Point::new(b.min.x.clone(), b.min.y.clone()),
        Point::new(b.max.x.clone(), b.min.y.clone()),
        Point::new(b.max.x.clone(), b.max.y.clone()),
        Point::new(b.min.x.clone(), b.max.y.clone()),
    ];
    let sides: Vec<Orientation> = corners.iter().map(|c| orientation(p, &ahead, c)).collect();
    sides.iter().all(|o| *o == Orientation::Left) || sides.iter().all(|o| *o == Orientation::Right)
}

/// Parameter interval `[lo, hi]` (along `through + t·dir`) of the maximal
/// free sub-segment containing `through`, or `None` if `through` is not in
/// free space or the piece degenerates to a point.
fn free_interval(inst: &Instance, through: &Point, dir: &Vector) -> Option<(Coord, Coord)> {
    if point_in_polygon(through, &inst.workspace) == Location::Outside || inst.inside_some_shape(through) {
        return None;
    }
    let relevant: Vec<&Polygon> = inst.polygons().map(|(_, p)| p).filter(|p| !line_misses_box(through, dir, p)).collect();
    let mut params = vec![int(0)];
    for e in inst.workspace.edges() {
        params.extend(line_segment_params(through, dir, &e));
    }
    for poly in &relevant {
        for e in poly.edges() {
            params.extend(line_segment_params(through, dir, &e));
        }
    }
    params.sort();
    params.dedup();
    let zero = params.binary_search(&int(0)).expect("zero is a parameter");
    let blocked = |lo: &Coord, hi: &Coord| {
        let mid = through.offset(dir, &((lo + hi) / int(2)));
        point_in_polygon(&mid, &inst.workspace) == Location::Outside
            || relevant.iter().any(|p| point_in_polygon(&mid, p) == Location::Inside)
    };
    let mut hi = zero;
    while hi + 1 < params.len() && !blocked(&params[hi], &params[hi + 1]) {
        hi += 1;
    }
    let mut lo = zero;
    while lo > 0 && !blocked(&params[lo - 1], &params[lo]) {
        lo -= 1;
    }
    if lo == hi {
        return None;
    }
    Some((params[lo].clone(), params[hi].clone()))
}

/// Maximal free sub-segment of the line through `through` with direction
/// `dir` that contains `through`.
pub fn clip_to_free_space(through: &Point, dir: &Vector, inst: &Instance) -> Option<Segment> {
    assert!(!dir.is_zero(), "direction must be nonzero");
    let (lo, hi) = free_interval(inst, through, dir)?;
    Some(Segment { a: through.offset(dir, &lo), b: through.offset(dir, &hi) }.canonical())
}

/// Direction `j` of resolution `r`: the tangent-half-angle image of
/// `u = j / (r - j)`, i.e. `(r(r - 2j), 2j(r - j))`, sweeping the half-turn
/// `[0, π)`. Directions of resolution `r` reappear in every multiple of `r`.
pub fn sampled_direction(resolution: u32, j: u32) -> Vector {
    assert!(j < resolution);
    let (r, j) = (resolution as i64, j as i64);
    Vector::new(int(r * (r - 2 * j)), int(2 * j * (r - j)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateOptions {
    /// Also anchor bitangents at reflex workspace vertices.
    pub workspace_anchors: bool,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        Self { workspace_anchors: true }
    }
}

pub fn enumerate_bitangents(inst: &Instance) -> Vec<CandidateSegment> {
    enumerate_with(inst, None, CandidateOptions::default())
}

/// Bitangents plus `resolution` sampled tangent directions per object and
/// obstacle vertex.
pub fn enumerate_sampled_tangents(inst: &Instance, resolution: u32) -> Vec<CandidateSegment> {
    assert!(resolution >= 1, "resolution must be at least 1");
    enumerate_with(inst, Some(resolution), CandidateOptions::default())
}

pub fn enumerate_with(inst: &Instance, resolution: Option<u32>, opts: CandidateOptions) -> Vec<CandidateSegment> {
    let anchors = anchors(inst, opts.workspace_anchors);
    let mut geometries: BTreeMap<Segment, CandidateSource> = BTreeMap::new();

    for i in 0..anchors.len() {
        for j in (i + 1)..anchors.len() {
            let (a, b) = (&anchors[i], &anchors[j]);
            if a.point == b.point {
                continue;
            }
            let dir = b.point.sub(&a.point);
            if !tangent_at(a, &dir) || !tangent_at(b, &dir) {
                continue;
            }
            let Some((lo, hi)) = free_interval(inst, &a.point, &dir) else { continue };
            // b sits at parameter 1.
            if lo > int(1) || hi < int(1) {
                continue;
            }
            let seg = Segment { a: a.point.offset(&dir, &lo), b: a.point.offset(&dir, &hi) }.canonical();
            geometries.insert(seg, CandidateSource::Bitangent);
        }
    }

    if let Some(r) = resolution {
        for anchor in anchors.iter().filter(|a| a.owner != AnchorOwner::Workspace) {
            for j in 0..r {
                let dir = sampled_direction(r, j);
                if !tangent_at(anchor, &dir) {
                    continue;
                }
                if let Some(seg) = clip_to_free_space(&anchor.point, &dir, inst) {
                    geometries.entry(seg).or_insert(CandidateSource::SampledTangent { resolution: r, direction: j });
                }
            }
        }
    }

    let mut out: Vec<(Vec<usize>, Vec<Side>, Segment, CandidateSegment)> = Vec::new();
    for (seg, source) in geometries {
        expand_sides(&anchors, &seg, source, &mut out);
    }
    out.sort_by(|x, y| (&x.0, &x.1, &x.2).cmp(&(&y.0, &y.1, &y.2)));
    out.into_iter()
        .enumerate()
        .map(|(id, (_, _, _, mut c))| {
            c.id = id;
            c
        })
        .collect()
}

/// Emits one candidate per side assignment of the point objects on `seg`.
fn expand_sides(
    anchors: &[Anchor],
    seg: &Segment,
    source: CandidateSource,
    out: &mut Vec<(Vec<usize>, Vec<Side>, Segment, CandidateSegment)>,
) {
    let dir = seg.direction();
    let mut fixed: Vec<(usize, Tangency)> = Vec::new();
    let mut free_points: Vec<usize> = Vec::new();
    for (idx, a) in anchors.iter().enumerate() {
        if !seg.contains(&a.point) {
            continue;
        }
        match &a.kind {
            AnchorKind::PointObject => free_points.push(idx),
            AnchorKind::PointObstacle => {
                fixed.push((idx, Tangency { anchor: a.point.clone(), owner: a.owner, side: Side::On }));
            }
            AnchorKind::Corner { prev, next } => {
                if !tangent_at(a, &dir) {
                    continue;
                }
                let s = match Side::of(&seg.a, &seg.b, prev) {
                    Side::On => Side::of(&seg.a, &seg.b, next),
                    s => s,
                };
                fixed.push((idx, Tangency { anchor: a.point.clone(), owner: a.owner, side: s }));
            }
        }
    }
    for mask in 0u64..(1u64 << free_points.len()) {
        let mut tangencies: Vec<(usize, Tangency)> = fixed.clone();
        for (bit, &idx) in free_points.iter().enumerate() {
            let side = if mask >> bit & 1 == 0 { Side::Above } else { Side::Below };
            tangencies.push((idx, Tangency { anchor: anchors[idx].point.clone(), owner: anchors[idx].owner, side }));
        }
        tangencies.sort_by_key(|(idx, _)| *idx);
        let key: Vec<usize> = tangencies.iter().map(|(i, _)| *i).collect();
        let sides: Vec<Side> = tangencies.iter().map(|(_, t)| t.side).collect();
        out.push((
            key,
            sides,
            seg.clone(),
            CandidateSegment { id: 0, geometry: seg.clone(), tangencies: tangencies.into_iter().map(|(_, t)| t).collect(), source },
        ));
    }
}

/// Checks the candidate invariants against an instance; returns a
/// description of the first violation.
pub fn check_candidate(inst: &Instance, c: &CandidateSegment) -> Result<(), String> {
    let s = &c.geometry;
    for (r, poly) in inst.polygons() {
        if segment_intersects_interior(s, poly) {
            return Err(format!("candidate {} crosses the interior of {r}", c.id));
        }
    }
    for end in [&s.a, &s.b] {
        if point_in_polygon(end, &inst.workspace) == Location::Outside {
            return Err(format!("candidate {} ends outside the workspace at {end}", c.id));
        }
    }
    // Inside the closed workspace iff no piece between boundary crossings
    // has its midpoint outside.
    let mut stops: Vec<Point> = vec![s.a.clone(), s.b.clone()];
    for e in inst.workspace.edges() {
        match segment_intersection(s, &e) {
            Intersection::Point(q) => stops.push(q),
            Intersection::Overlap(o) => {
                stops.push(o.a);
                stops.push(o.b);
            }
            Intersection::Empty => {}
        }
    }
    stops.sort();
    stops.dedup();
    let exterior_hit =
        stops.windows(2).any(|w| point_in_polygon(&w[0].midpoint(&w[1]), &inst.workspace) == Location::Outside);
    if exterior_hit {
        return Err(format!("candidate {} leaves the workspace", c.id));
    }
    for end in [&s.a, &s.b] {
        let on_boundary = point_in_polygon(end, &inst.workspace) == Location::Boundary
            || inst.polygons().any(|(_, p)| point_in_polygon(end, p) == Location::Boundary);
        if !on_boundary {
            return Err(format!("candidate {} ends in free space at {end}", c.id));
        }
    }
    Ok(())
}
