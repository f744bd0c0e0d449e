//! Planar subdivision of free space by candidate barriers.
//!
//! Workspace edges, shape edges and candidate segments are split at every
//! mutual intersection, merged into a half-edge structure, and traced into
//! faces. Faces of free space become cells; each stretch of candidate
//! between two cells becomes an adjacency that is blocked once any covering
//! candidate is selected.
//!
//! A point object sitting on candidates gets its own cell, linked to each
//! surrounding sector by the candidates whose pinned side excludes that
//! sector. When nothing pinned excludes a sector the sector is labeled
//! directly. A polygon object with a candidate lying along one of its edges
//! is handled the same way: the contact across that edge is a link covered
//! by the flush candidates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use thiserror::Error;

use crate::candidates::{CandidateSegment, Side};
use crate::geometry::{
    approx as approx_of, int, orientation, point_in_polygon, segment_intersection_on_lines, winding_number, Line, Coord, Intersection, Location,
    Orientation, Point, Segment, Vector,
};
use crate::instance::{Instance, Shape, ShapeRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("cell near {at} touches {first} and {second}, which belong to different sets")]
    LabelConflict { at: Point, first: ShapeRef, second: ShapeRef },
    #[error("inconsistent subdivision: {0}")]
    Topology(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    Face,
    /// An object reached only across candidates: a point object on
    /// candidate lines, or a polygon object with a candidate flush on an edge.
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub id: usize,
    pub kind: CellKind,
    /// Outer boundary, counterclockwise. Empty for object cells.
    pub boundary: Vec<Point>,
    /// Boundaries of enclosed components, clockwise.
    pub holes: Vec<Vec<Point>>,
    /// Objects touching the cell along a boundary stretch or lying in it.
    pub objects: Vec<ShapeRef>,
    /// Set index shared by `objects`, if any.
    pub label: Option<usize>,
    pub representative_point: Point,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyEdge {
    pub cells: (usize, usize),
    /// Shared boundary pieces; empty for object links.
    pub portions: Vec<Segment>,
    pub covering_candidates: Vec<usize>,
}

/// Counts for the Euler relation `V - E + F = 1 + C`, where `F` includes
/// the unbounded face and `C` counts connected components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrangementStats {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub components: usize,
}

impl ArrangementStats {
    pub fn euler_holds(&self) -> bool {
        self.vertices + self.faces == self.edges + 1 + self.components
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementResult {
    pub cells: Vec<Cell>,
    pub adjacencies: Vec<AdjacencyEdge>,
    pub num_candidates: usize,
    pub stats: ArrangementStats,
}

impl ArrangementResult {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// The face cell whose open interior contains `p`; `None` on boundaries
    /// and outside free space.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        self.cells.iter().filter(|c| c.kind == CellKind::Face).find(|c| face_contains(c, p)).map(|c| c.id)
    }
}

fn cycle_edges(cycle: &[Point]) -> impl Iterator<Item = (&Point, &Point)> {
    cycle.iter().zip(cycle.iter().cycle().skip(1))
}

fn on_cycle(cycle: &[Point], p: &Point) -> bool {
    cycle_edges(cycle).any(|(a, b)| Segment { a: a.clone(), b: b.clone() }.contains(p))
}

fn face_contains(c: &Cell, p: &Point) -> bool {
    if on_cycle(&c.boundary, p) || winding_number(p, &c.boundary) == 0 {
        return false;
    }
    c.holes.iter().all(|h| !on_cycle(h, p) && winding_number(p, h) == 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tag {
    Workspace,
    Shape(ShapeRef),
    Candidate(usize),
}

#[derive(Clone, Copy)]
struct FBox {
    lo: (f64, f64),
    hi: (f64, f64),
}

impl FBox {
    const SLACK: f64 = 1e-7;

    fn of(a: &Point, b: &Point) -> FBox {
        let (ax, ay) = a.to_f64();
        let (bx, by) = b.to_f64();
        FBox { lo: (ax.min(bx), ay.min(by)), hi: (ax.max(bx), ay.max(by)) }
    }

    fn of_points(pts: &[Point]) -> FBox {
        let mut b = FBox::of(&pts[0], &pts[0]);
        for p in pts {
            let (x, y) = p.to_f64();
            b.lo = (b.lo.0.min(x), b.lo.1.min(y));
            b.hi = (b.hi.0.max(x), b.hi.1.max(y));
        }
        b
    }

    fn overlaps(&self, o: &FBox) -> bool {
        self.lo.0 <= o.hi.0 + Self::SLACK
            && o.lo.0 <= self.hi.0 + Self::SLACK
            && self.lo.1 <= o.hi.1 + Self::SLACK
            && o.lo.1 <= self.hi.1 + Self::SLACK
    }

    fn contains(&self, p: &Point) -> bool {
        self.overlaps(&FBox::of(p, p))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

struct Subdivision {
    points: Vec<Point>,
    /// Per edge: endpoints (lexicographic) and the inputs it lies on.
    edges: Vec<(usize, usize, Vec<Tag>)>,
    /// Per edge: a small integer vector pointing from the first endpoint to
    /// the second.
    dirs: Vec<Vector>,
    lines: Vec<Line>,
    /// Outgoing half-edges per vertex, counterclockwise from angle 0.
    around: Vec<Vec<usize>>,
    next: Vec<usize>,
}

impl Subdivision {
    fn origin(&self, h: usize) -> usize {
        let (u, v, _) = &self.edges[h / 2];
        if h.is_multiple_of(2) {
            *u
        } else {
            *v
        }
    }

    fn dest(&self, h: usize) -> usize {
        self.origin(h ^ 1)
    }

    /// Direction of a half-edge; only its angle is meaningful.
    fn direction(&self, h: usize) -> Vector {
        let d = &self.dirs[h / 2];
        if h.is_multiple_of(2) {
            d.clone()
        } else {
            Vector::new(-d.dx.clone(), -d.dy.clone())
        }
    }

    fn segment(&self, h: usize) -> Segment {
        Segment { a: self.points[self.origin(h)].clone(), b: self.points[self.dest(h)].clone() }
    }

    fn build(inputs: Vec<(Segment, Tag)>, extra_points: &[Point]) -> Subdivision {
        let boxes: Vec<FBox> = inputs.iter().map(|(s, _)| FBox::of(&s.a, &s.b)).collect();
        let lines: Vec<Line> = inputs.iter().map(|(s, _)| Line::through(s)).collect();
        let mut splits: Vec<Vec<Point>> = inputs.iter().map(|(s, _)| vec![s.a.clone(), s.b.clone()]).collect();
        for i in 0..inputs.len() {
            for j in (i + 1)..inputs.len() {
                if !boxes[i].overlaps(&boxes[j]) {
                    continue;
                }
                match segment_intersection_on_lines(&inputs[i].0, &lines[i], &inputs[j].0, &lines[j]) {
                    Intersection::Empty => {}
                    Intersection::Point(q) => {
                        splits[i].push(q.clone());
                        splits[j].push(q);
                    }
                    Intersection::Overlap(o) => {
                        for q in [o.a, o.b] {
                            splits[i].push(q.clone());
                            splits[j].push(q);
                        }
                    }
                }
            }
            for p in extra_points {
                if boxes[i].contains(p) && inputs[i].0.contains(p) {
                    splits[i].push(p.clone());
                }
            }
        }

        let mut pieces: BTreeMap<(Point, Point), (BTreeSet<Tag>, usize)> = BTreeMap::new();
        for (i, ((_, tag), mut pts)) in inputs.iter().zip(splits).enumerate() {
            pts.sort();
            pts.dedup();
            for w in pts.windows(2) {
                pieces.entry((w[0].clone(), w[1].clone())).or_insert_with(|| (BTreeSet::new(), i)).0.insert(*tag);
            }
        }

        let mut index: BTreeMap<Point, usize> = BTreeMap::new();
        for (a, b) in pieces.keys() {
            index.entry(a.clone()).or_insert(0);
            index.entry(b.clone()).or_insert(0);
        }
        let mut points = Vec::with_capacity(index.len());
        for (i, (p, slot)) in index.iter_mut().enumerate() {
            *slot = i;
            points.push(p.clone());
        }
        let mut edges: Vec<(usize, usize, Vec<Tag>)> = Vec::with_capacity(pieces.len());
        let mut dirs: Vec<Vector> = Vec::with_capacity(pieces.len());
        let mut edge_lines: Vec<Line> = Vec::with_capacity(pieces.len());
        for ((a, b), (tags, i)) in pieces {
            edges.push((index[&a], index[&b], tags.into_iter().collect()));
            dirs.push(inputs[i].0.direction().primitive());
            edge_lines.push(lines[i].clone());
        }

        let mut sub = Subdivision { points, edges, dirs, lines: edge_lines, around: Vec::new(), next: Vec::new() };
        let mut around: Vec<Vec<usize>> = vec![Vec::new(); sub.points.len()];
        for h in 0..2 * sub.edges.len() {
            around[sub.origin(h)].push(h);
        }
        for list in &mut around {
            let dirs: Vec<(usize, Vector)> = list.iter().map(|&h| (h, sub.direction(h))).collect();
            let mut dirs = dirs;
            dirs.sort_by(|x, y| x.1.angle_cmp(&y.1));
            *list = dirs.into_iter().map(|(h, _)| h).collect();
        }
        let mut pos = vec![0; 2 * sub.edges.len()];
        for list in &around {
            for (i, &h) in list.iter().enumerate() {
                pos[h] = i;
            }
        }
        // Keep the face on the left: leave v along the edge just clockwise
        // of the one we arrived on.
        let mut next = vec![0; 2 * sub.edges.len()];
        for (h, slot) in next.iter_mut().enumerate() {
            let t = h ^ 1;
            let list = &around[sub.origin(t)];
            *slot = list[(pos[t] + list.len() - 1) % list.len()];
        }
        sub.around = around;
        sub.next = next;
        sub
    }
}

struct Face {
    outer: usize,
    holes: Vec<usize>,
}

/// Twice the signed area enclosed by a half-edge cycle.
fn cycle_area2(sub: &Subdivision, cycle: &[usize]) -> Coord {
    let mut a = int(0);
    for &h in cycle {
        let p = &sub.points[sub.origin(h)];
        let q = &sub.points[sub.dest(h)];
        a += &p.x * &q.y - &q.x * &p.y;
    }
    a
}

/// Floating estimate of a cycle area with a bound on its error, falling
/// back to exact arithmetic when the estimate cannot decide.
struct Area<'a> {
    sub: &'a Subdivision,
    cycle: &'a [usize],
    approx: f64,
    err: f64,
}

impl<'a> Area<'a> {
    fn of(sub: &'a Subdivision, cycle: &'a [usize]) -> Area<'a> {
        let (mut approx, mut mag) = (0.0, 0.0);
        for &h in cycle {
            let p = &sub.points[sub.origin(h)];
            let q = &sub.points[sub.dest(h)];
            let (px, py, qx, qy) = (approx_of(&p.x), approx_of(&p.y), approx_of(&q.x), approx_of(&q.y));
            approx += px * qy - qx * py;
            mag += (px * qy).abs() + (qx * py).abs();
        }
        let err = if approx.is_finite() && mag.is_finite() { 1e-12 * mag } else { f64::INFINITY };
        Area { sub, cycle, approx, err }
    }

    fn exact(&self) -> Coord {
        cycle_area2(self.sub, self.cycle)
    }

    fn is_positive(&self) -> bool {
        if self.approx.abs() > self.err {
            return self.approx > 0.0;
        }
        self.exact().is_positive()
    }

    fn cmp(&self, other: &Area) -> Ordering {
        if (self.approx - other.approx).abs() > self.err + other.err {
            return self.approx.total_cmp(&other.approx);
        }
        self.exact().cmp(&other.exact())
    }
}

fn cycle_points(sub: &Subdivision, cycle: &[usize]) -> Vec<Point> {
    cycle.iter().map(|&h| sub.points[sub.origin(h)].clone()).collect()
}

/// A point strictly inside the face: step off the middle of an outer edge
/// towards the interior, half way to the nearest other boundary.
fn interior_point(sub: &Subdivision, cycles: &[Vec<usize>], face: &Face) -> Point {
    let h0 = cycles[face.outer][0];
    let m = sub.segment(h0).midpoint();
    let n = sub.direction(h0).perp();
    let m2 = m.offset(&n, &int(1));
    let (mx, my, nx, ny) = (approx_of(&m.x), approx_of(&m.y), approx_of(&n.dx), approx_of(&n.dy));
    let nn = nx * nx + ny * ny;
    // Approximate ray parameters first; only hits near the nearest one are
    // recomputed exactly.
    let mut hits: Vec<(f64, usize)> = Vec::new();
    for &c in std::iter::once(&face.outer).chain(&face.holes) {
        for &h in &cycles[c] {
            if h / 2 == h0 / 2 {
                continue;
            }
            let a = &sub.points[sub.origin(h)];
            let b = &sub.points[sub.dest(h)];
            let oa = orientation(&m, &m2, a);
            let ob = orientation(&m, &m2, b);
            if oa == ob && oa != Orientation::Collinear {
                continue;
            }
            let (ax, ay, bx, by) = (approx_of(&a.x), approx_of(&a.y), approx_of(&b.x), approx_of(&b.y));
            let ta = (nx * (ax - mx) + ny * (ay - my)) / nn;
            let tb = (nx * (bx - mx) + ny * (by - my)) / nn;
            let ca = nx * (ay - my) - ny * (ax - mx);
            let cb = nx * (by - my) - ny * (bx - mx);
            let t = if oa == Orientation::Collinear {
                if ob == Orientation::Collinear { ta.min(tb) } else { ta }
            } else if ob == Orientation::Collinear {
                tb
            } else {
                ta + (tb - ta) * (ca / (ca - cb))
            };
            hits.push((t, h));
        }
    }
    let tol = |t: f64| 1e-7 * (1.0 + t.abs());
    let floor = hits.iter().map(|&(t, _)| t).filter(|&t| t > tol(t)).fold(f64::INFINITY, f64::min);
    // Points on the ray line, ordered along `n`.
    let along = |p: &Point, q: &Point| {
        if n.dx.is_positive() {
            p.x.cmp(&q.x)
        } else if n.dx.is_negative() {
            q.x.cmp(&p.x)
        } else if n.dy.is_positive() {
            p.y.cmp(&q.y)
        } else {
            q.y.cmp(&p.y)
        }
    };
    let ray = Line::through(&Segment { a: m.clone(), b: m2.clone() });
    let mut best: Option<Point> = None;
    for &(tf, h) in &hits {
        if tf < -tol(tf) || tf > floor + tol(floor) {
            continue;
        }
        let a = &sub.points[sub.origin(h)];
        let b = &sub.points[sub.dest(h)];
        let oa = orientation(&m, &m2, a);
        let ob = orientation(&m, &m2, b);
        let mut pts: Vec<Point> = Vec::new();
        if oa == Orientation::Collinear {
            pts.push(a.clone());
        }
        if ob == Orientation::Collinear {
            pts.push(b.clone());
        }
        if pts.is_empty() {
            pts.extend(ray.meet(&sub.lines[h / 2]));
        }
        for q in pts {
            if along(&m, &q) == Ordering::Less && best.as_ref().is_none_or(|b| along(&q, b) == Ordering::Less) {
                best = Some(q);
            }
        }
    }
    let q = best.expect("bounded face has an opposite boundary");
    m.midpoint(&q)
}

/// Side of the sector from `d0` counterclockwise to `d1` relative to the
/// directed line with direction `line`.
fn sector_side(line: &Vector, d0: &Vector, d1: &Vector) -> Side {
    for d in [d0, d1] {
        let c = line.cross(d);
        if c.is_positive() {
            return Side::Above;
        }
        if c.is_negative() {
            return Side::Below;
        }
    }
    // Both bounding rays lie on the line: a half-plane sector.
    if line.dot(d0).is_positive() {
        Side::Above
    } else {
        Side::Below
    }
}

pub fn build_arrangement(inst: &Instance, candidates: &[CandidateSegment]) -> Result<ArrangementResult, ArrangementError> {
    let mut inputs: Vec<(Segment, Tag)> = Vec::new();
    for e in inst.workspace.edges() {
        inputs.push((e.canonical(), Tag::Workspace));
    }
    for (r, poly) in inst.polygons() {
        for e in poly.edges() {
            inputs.push((e.canonical(), Tag::Shape(r)));
        }
    }
    for c in candidates {
        inputs.push((c.geometry.canonical(), Tag::Candidate(c.id)));
    }
    let point_objects: Vec<(ShapeRef, Point)> = inst
        .shapes()
        .filter_map(|(r, s)| match (r, s) {
            (ShapeRef::Object { .. }, Shape::Point(p)) => Some((r, p.clone())),
            _ => None,
        })
        .collect();
    let extra: Vec<Point> = point_objects.iter().map(|(_, p)| p.clone()).collect();
    let sub = Subdivision::build(inputs, &extra);
    let by_id: BTreeMap<usize, &CandidateSegment> = candidates.iter().map(|c| (c.id, c)).collect();

    // Trace boundary cycles.
    let nh = sub.next.len();
    let mut cycle_of = vec![usize::MAX; nh];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..nh {
        if cycle_of[start] != usize::MAX {
            continue;
        }
        let mut cyc = Vec::new();
        let mut h = start;
        while cycle_of[h] == usize::MAX {
            cycle_of[h] = cycles.len();
            cyc.push(h);
            h = sub.next[h];
        }
        if h != start {
            return Err(ArrangementError::Topology("half-edge cycle does not close".into()));
        }
        cycles.push(cyc);
    }
    let areas: Vec<Area> = cycles.iter().map(|c| Area::of(&sub, c)).collect();
    let positive: Vec<bool> = areas.iter().map(Area::is_positive).collect();

    let mut uf = UnionFind::new(sub.points.len());
    for (u, v, _) in &sub.edges {
        uf.union(*u, *v);
    }
    let comp_of_cycle: Vec<usize> = cycles.iter().map(|c| uf.find(sub.origin(c[0]))).collect();
    let components = (0..sub.points.len()).filter(|&v| uf.find(v) == v).count();

    let mut faces: Vec<Face> = Vec::new();
    let mut face_of_cycle: Vec<Option<usize>> = vec![None; cycles.len()];
    for (i, &pos) in positive.iter().enumerate() {
        if pos {
            face_of_cycle[i] = Some(faces.len());
            faces.push(Face { outer: i, holes: Vec::new() });
        }
    }
    let pts_of: Vec<Vec<Point>> = cycles.iter().map(|c| cycle_points(&sub, c)).collect();
    let boxes: Vec<FBox> = pts_of.iter().map(|p| FBox::of_points(p)).collect();
    for i in 0..cycles.len() {
        if positive[i] {
            continue;
        }
        let q = &pts_of[i][0];
        let mut host: Option<usize> = None;
        for (f, face) in faces.iter().enumerate() {
            let o = face.outer;
            if comp_of_cycle[o] == comp_of_cycle[i] || !boxes[o].contains(q) {
                continue;
            }
            if winding_number(q, &pts_of[o]) == 0 {
                continue;
            }
            if host.is_none_or(|h| areas[o].cmp(&areas[faces[h].outer]) == Ordering::Less) {
                host = Some(f);
            }
        }
        if let Some(f) = host {
            faces[f].holes.push(i);
            face_of_cycle[i] = Some(f);
        }
    }
    let face_of_half = |h: usize| face_of_cycle[cycle_of[h]];

    let stats = ArrangementStats {
        vertices: sub.points.len(),
        edges: sub.edges.len(),
        faces: faces.len() + 1,
        components,
    };
    if !stats.euler_holds() {
        return Err(ArrangementError::Topology(format!("Euler relation fails: {stats:?}")));
    }

    // Keep faces of free space.
    let shape_polys: Vec<(FBox, &crate::geometry::Polygon)> =
        inst.polygons().map(|(_, p)| (FBox::of_points(p.vertices()), p)).collect();
    let mut reps: Vec<Point> = Vec::with_capacity(faces.len());
    let mut free: Vec<bool> = Vec::with_capacity(faces.len());
    for face in &faces {
        let rep = interior_point(&sub, &cycles, face);
        let is_free = point_in_polygon(&rep, &inst.workspace) == Location::Inside
            && !shape_polys.iter().any(|(b, p)| b.contains(&rep) && point_in_polygon(&rep, p) == Location::Inside);
        free.push(is_free);
        reps.push(rep);
    }

    // Objects touching each face along an edge. A candidate lying flush on
    // the object's edge turns that contact into a link it can block.
    struct Pinned {
        object: ShapeRef,
        at: Point,
        links: Vec<(usize, Vec<usize>)>,
    }
    let mut touching: Vec<BTreeSet<ShapeRef>> = vec![BTreeSet::new(); faces.len()];
    let mut flush: BTreeMap<ShapeRef, BTreeSet<(usize, Vec<usize>)>> = BTreeMap::new();
    for h in 0..nh {
        let Some(f) = face_of_half(h) else { continue };
        if !free[f] {
            continue;
        }
        let tags = &sub.edges[h / 2].2;
        let group: Vec<usize> = tags
            .iter()
            .filter_map(|t| match t {
                Tag::Candidate(id) => Some(*id),
                _ => None,
            })
            .collect();
        for tag in tags {
            if let Tag::Shape(r @ ShapeRef::Object { .. }) = tag {
                if group.is_empty() {
                    touching[f].insert(*r);
                } else {
                    flush.entry(*r).or_default().insert((f, group.clone()));
                }
            }
        }
    }
    let mut pinned: Vec<Pinned> = flush
        .into_iter()
        .map(|(r, links)| {
            let at = inst.shape(r).vertices()[0].clone();
            Pinned { object: r, at, links: links.into_iter().collect() }
        })
        .collect();

    // Point objects: inside a face, or pinned at a vertex.
    let vertex_of: BTreeMap<&Point, usize> = sub.points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    for (r, p) in &point_objects {
        match vertex_of.get(p) {
            None => {
                let f = (0..faces.len())
                    .find(|&f| {
                        let face = &faces[f];
                        free[f]
                            && boxes[face.outer].contains(p)
                            && winding_number(p, &pts_of[face.outer]) != 0
                            && face.holes.iter().all(|&h| winding_number(p, &pts_of[h]) == 0)
                    })
                    .ok_or_else(|| ArrangementError::Topology(format!("point object {r} lies in no cell")))?;
                touching[f].insert(*r);
            }
            Some(&v) => {
                let out = &sub.around[v];
                let incident: BTreeSet<usize> = out
                    .iter()
                    .flat_map(|&h| sub.edges[h / 2].2.iter())
                    .filter_map(|t| match t {
                        Tag::Candidate(id) => Some(*id),
                        _ => None,
                    })
                    .collect();
                let pins: Vec<(usize, Side, Vector)> = incident
                    .iter()
                    .filter_map(|id| {
                        let c = by_id.get(id)?;
                        c.side_of_pinned(p).map(|s| (*id, s, c.geometry.canonical().direction()))
                    })
                    .collect();
                let mut links = Vec::new();
                for (i, &h) in out.iter().enumerate() {
                    let h1 = out[(i + 1) % out.len()];
                    let Some(f) = face_of_half(h) else { continue };
                    if !free[f] {
                        continue;
                    }
                    let (d0, d1) = (sub.direction(h), sub.direction(h1));
                    let group: Vec<usize> = pins
                        .iter()
                        .filter(|(_, s, line)| sector_side(line, &d0, &d1) != *s)
                        .map(|(id, _, _)| *id)
                        .collect();
                    if group.is_empty() {
                        touching[f].insert(*r);
                    } else {
                        links.push((f, group));
                    }
                }
                if !links.is_empty() {
                    pinned.push(Pinned { object: *r, at: p.clone(), links });
                }
            }
        }
    }

    // Assemble cells in canonical order.
    enum Src {
        Face(usize),
        Pin(usize),
    }
    let mut order: Vec<(Point, Src)> = Vec::new();
    for f in 0..faces.len() {
        if free[f] {
            order.push((reps[f].clone(), Src::Face(f)));
        }
    }
    for (i, pin) in pinned.iter().enumerate() {
        order.push((pin.at.clone(), Src::Pin(i)));
    }
    order.sort_by(|a, b| a.0.cmp(&b.0));
    let mut cell_of_face: Vec<Option<usize>> = vec![None; faces.len()];
    let mut cells = Vec::with_capacity(order.len());
    for (id, (rep, src)) in order.into_iter().enumerate() {
        let (kind, boundary, holes, objects) = match src {
            Src::Face(f) => {
                cell_of_face[f] = Some(id);
                let holes = faces[f].holes.iter().map(|&h| pts_of[h].clone()).collect();
                (CellKind::Face, pts_of[faces[f].outer].clone(), holes, touching[f].iter().copied().collect::<Vec<_>>())
            }
            Src::Pin(i) => (CellKind::Object, Vec::new(), Vec::new(), vec![pinned[i].object]),
        };
        let label = label_of(&objects, &rep)?;
        cells.push(Cell { id, kind, boundary, holes, objects, label, representative_point: rep });
    }
    let pinned_cells: Vec<usize> =
        cells.iter().filter(|c| c.kind == CellKind::Object).map(|c| c.id).collect();

    let mut adj: BTreeMap<(usize, usize, Vec<usize>), Vec<Segment>> = BTreeMap::new();
    for (e, (_, _, tags)) in sub.edges.iter().enumerate() {
        let (Some(fa), Some(fb)) = (face_of_half(2 * e), face_of_half(2 * e + 1)) else { continue };
        let (Some(ca), Some(cb)) = (cell_of_face[fa], cell_of_face[fb]) else { continue };
        if ca == cb {
            continue;
        }
        let group: Vec<usize> = tags
            .iter()
            .filter_map(|t| match t {
                Tag::Candidate(id) => Some(*id),
                _ => None,
            })
            .collect();
        if group.is_empty() {
            return Err(ArrangementError::Topology(format!("free cells {ca} and {cb} share a non-candidate edge")));
        }
        adj.entry((ca.min(cb), ca.max(cb), group)).or_default().push(sub.segment(2 * e));
    }
    // Pinned cells were sorted among faces; match them back by position.
    let mut pin_cell: BTreeMap<&Point, usize> = BTreeMap::new();
    for &id in &pinned_cells {
        pin_cell.insert(&cells[id].representative_point, id);
    }
    for pin in &pinned {
        let pc = pin_cell[&pin.at];
        for (f, group) in &pin.links {
            let fc = cell_of_face[*f].expect("linked sectors are free");
            adj.entry((pc.min(fc), pc.max(fc), group.clone())).or_default();
        }
    }
    let adjacencies = adj
        .into_iter()
        .map(|((a, b, group), portions)| AdjacencyEdge { cells: (a, b), portions, covering_candidates: group })
        .collect();

    Ok(ArrangementResult { cells, adjacencies, num_candidates: candidates.len(), stats })
}

fn label_of(objects: &[ShapeRef], at: &Point) -> Result<Option<usize>, ArrangementError> {
    let mut label: Option<(usize, ShapeRef)> = None;
    for r in objects {
        let class = r.class().expect("objects have a class");
        match label {
            None => label = Some((class, *r)),
            Some((c, first)) if c != class => {
                return Err(ArrangementError::LabelConflict { at: at.clone(), first, second: *r });
            }
            Some(_) => {}
        }
    }
    Ok(label.map(|(c, _)| c))
}

/// Connected components of free space once the `selected` candidates are
/// erected. Returns a component id per cell, numbered by smallest member.
pub fn connectivity(arr: &ArrangementResult, selected: &BTreeSet<usize>) -> Vec<usize> {
    let mut uf = UnionFind::new(arr.cells.len());
    for e in &arr.adjacencies {
        if !e.covering_candidates.iter().any(|c| selected.contains(c)) {
            uf.union(e.cells.0, e.cells.1);
        }
    }
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    (0..arr.cells.len())
        .map(|c| {
            let root = uf.find(c);
            let next = ids.len();
            *ids.entry(root).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn manual(id: usize, a: (i64, i64), b: (i64, i64)) -> CandidateSegment {
        CandidateSegment::manual(id, Segment::new(p(a.0, a.1), p(b.0, b.1)).unwrap())
    }

    fn square(size: i64) -> Polygon {
        Polygon::from_ints(&[(0, 0), (size, 0), (size, size), (0, size)]).unwrap()
    }

    #[test]
    fn empty_workspace_is_one_cell() {
        let inst = Instance { workspace: square(10), sets: vec![vec![]], obstacles: vec![] };
        let arr = build_arrangement(&inst, &[]).unwrap();
        assert_eq!(arr.num_cells(), 1);
        assert!(arr.adjacencies.is_empty());
        assert!(arr.stats.euler_holds());
        assert_eq!(arr.locate(&p(3, 3)), Some(0));
        assert_eq!(arr.locate(&p(0, 3)), None);
    }

    #[test]
    fn crossing_chords_make_four_cells_without_corner_adjacency() {
        let inst = Instance { workspace: square(10), sets: vec![vec![]], obstacles: vec![] };
        let arr = build_arrangement(&inst, &[manual(0, (0, 5), (10, 5)), manual(1, (5, 0), (5, 10))]).unwrap();
        assert_eq!(arr.num_cells(), 4);
        // Diagonal quadrants meet at one point only.
        assert_eq!(arr.adjacencies.len(), 4);
        let all: BTreeSet<usize> = [0, 1].into();
        assert_eq!(connectivity(&arr, &all), vec![0, 1, 2, 3]);
        let one: BTreeSet<usize> = [0].into();
        let comps = connectivity(&arr, &one);
        assert_eq!(comps.iter().collect::<BTreeSet<_>>().len(), 2);
    }

    #[test]
    fn isolated_obstacle_becomes_a_hole() {
        let ob = Polygon::from_ints(&[(4, 4), (6, 4), (6, 6), (4, 6)]).unwrap();
        let inst = Instance {
            workspace: square(10),
            sets: vec![vec![Shape::Point(p(1, 1))]],
            obstacles: vec![Shape::Polygon(ob)],
        };
        let arr = build_arrangement(&inst, &[]).unwrap();
        assert_eq!(arr.num_cells(), 1);
        assert_eq!(arr.cells[0].holes.len(), 1);
        assert_eq!(arr.cells[0].label, Some(0));
        assert_eq!(arr.locate(&p(5, 5)), None);
        assert!(arr.stats.euler_holds());
    }

    #[test]
    fn chord_split_by_obstacle() {
        let ob = Polygon::from_ints(&[(4, 4), (6, 4), (6, 6), (4, 6)]).unwrap();
        let inst = Instance { workspace: square(10), sets: vec![vec![]], obstacles: vec![Shape::Polygon(ob)] };
        let arr = build_arrangement(&inst, &[manual(0, (0, 5), (4, 5)), manual(1, (6, 5), (10, 5))]).unwrap();
        assert_eq!(arr.num_cells(), 2);
        assert_eq!(arr.adjacencies.len(), 2);
        let below = arr.locate(&p(5, 2)).unwrap();
        let above = arr.locate(&p(5, 8)).unwrap();
        assert_ne!(below, above);
    }

    #[test]
    fn pinned_point_links_to_sectors() {
        let inst = Instance {
            workspace: square(10),
            sets: vec![vec![Shape::Point(p(5, 5))], vec![Shape::Point(p(5, 8))]],
            obstacles: vec![],
        };
        let mut c = manual(0, (0, 5), (10, 5));
        c.tangencies.push(crate::candidates::Tangency {
            anchor: p(5, 5),
            owner: crate::candidates::AnchorOwner::Shape(ShapeRef::Object { set: 0, index: 0 }),
            side: Side::Below,
        });
        let arr = build_arrangement(&inst, &[c]).unwrap();
        assert_eq!(arr.num_cells(), 3);
        let pin = arr.cells.iter().find(|c| c.kind == CellKind::Object).unwrap();
        assert_eq!(pin.label, Some(0));
        let top = arr.locate(&p(5, 8)).unwrap();
        let bottom = arr.locate(&p(5, 2)).unwrap();
        assert_eq!(arr.cells[bottom].label, Some(0));
        assert_eq!(arr.cells[top].label, Some(1));
        // The point reaches the upper half only while the chord is down.
        let link = arr.adjacencies.iter().find(|e| e.portions.is_empty()).unwrap();
        assert_eq!(link.cells, (pin.id.min(top), pin.id.max(top)));
        assert_eq!(link.covering_candidates, vec![0]);
    }
}
