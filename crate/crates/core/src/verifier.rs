//! Independent separation check and brute-force oracle.
//!
//! The check shares nothing with the arrangement builder. It cuts the plane
//! into vertical slabs at every wall endpoint, wall crossing and point
//! object, so walls inside a slab never cross and split it into trapezoids.
//! Trapezoids in free space are joined across slab boundaries wherever
//! they overlap along a stretch of positive length that no vertical wall
//! covers. Objects of different sets reaching the same component is a
//! failure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::{CandidateSegment, Side};
use crate::geometry::{
    int, orientation, point_in_polygon, segment_intersection, segment_intersects_interior, Coord, Intersection,
    Location, Orientation, Point, Segment,
};
use crate::instance::{Instance, Shape, ShapeRef};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Barrier {
    pub segment: Segment,
    /// Point objects on the segment held to one side of it. Sides are taken
    /// against the segment directed from its smaller endpoint to its larger.
    pub pins: Vec<(Point, Side)>,
}

impl Barrier {
    pub fn plain(segment: Segment) -> Self {
        Barrier { segment, pins: Vec::new() }
    }

    pub fn from_candidate(c: &CandidateSegment) -> Self {
        Barrier { segment: c.geometry.clone(), pins: c.pins() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("barrier {index} is invalid: {reason}")]
    InvalidBarrier { index: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub first: ShapeRef,
    pub second: ShapeRef,
    /// Trapezoid ids from one object to the other.
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub witness: Option<Witness>,
    pub regions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WallKind {
    /// Workspace edge (`None`) or shape edge.
    Boundary(Option<ShapeRef>),
    Barrier(usize),
}

struct Wall {
    a: Point,
    b: Point,
    kind: WallKind,
}

impl Wall {
    fn y_at(&self, x: &Coord) -> Coord {
        &self.a.y + (&self.b.y - &self.a.y) * (x - &self.a.x) / (&self.b.x - &self.a.x)
    }
}

struct Trap {
    /// Wall indices bounding from below and above.
    lower: Vec<usize>,
    upper: Vec<usize>,
    sample: Point,
}

fn check_barrier(inst: &Instance, index: usize, b: &Barrier) -> Result<(), VerifyError> {
    let fail = |reason: String| Err(VerifyError::InvalidBarrier { index, reason });
    let s = &b.segment;
    if s.a == s.b {
        return fail("zero length".into());
    }
    for (r, poly) in inst.polygons() {
        if segment_intersects_interior(s, poly) {
            return fail(format!("crosses the interior of {r}"));
        }
    }
    let mut stops = vec![s.a.clone(), s.b.clone()];
    for e in inst.workspace.edges() {
        match segment_intersection(s, &e) {
            Intersection::Point(q) => stops.push(q),
            Intersection::Overlap(o) => stops.extend([o.a, o.b]),
            Intersection::Empty => {}
        }
    }
    stops.sort();
    stops.dedup();
    let outside = |p: &Point| point_in_polygon(p, &inst.workspace) == Location::Outside;
    if outside(&s.a) || outside(&s.b) || stops.windows(2).any(|w| outside(&w[0].midpoint(&w[1]))) {
        return fail("leaves the workspace".into());
    }
    for (p, side) in &b.pins {
        if !s.contains(p) {
            return fail(format!("pinned point {p} is not on it"));
        }
        if *side == Side::On {
            return fail(format!("pinned point {p} has no side"));
        }
    }
    Ok(())
}

fn side_of(seg: &Segment, p: &Point) -> Side {
    let (a, b) = if seg.a <= seg.b { (&seg.a, &seg.b) } else { (&seg.b, &seg.a) };
    match orientation(a, b, p) {
        Orientation::Left => Side::Above,
        Orientation::Right => Side::Below,
        Orientation::Collinear => Side::On,
    }
}

/// Union of `[lo, hi]` minus `covers` has positive length.
fn open_stretch(lo: &Coord, hi: &Coord, covers: &[(Coord, Coord)]) -> bool {
    let mut y = lo.clone();
    for (a, b) in covers {
        if b <= &y {
            continue;
        }
        if a > &y {
            return true;
        }
        y = b.clone();
        if &y >= hi {
            return false;
        }
    }
    &y < hi
}

struct Decomposition {
    traps: Vec<Trap>,
    adj: Vec<Vec<usize>>,
    touches: BTreeMap<ShapeRef, BTreeSet<usize>>,
}

fn decompose(inst: &Instance, barriers: &[Barrier]) -> Decomposition {
    let mut walls: Vec<Wall> = Vec::new();
    let mut push = |s: Segment, kind: WallKind| {
        let (a, b) = if s.a <= s.b { (s.a, s.b) } else { (s.b, s.a) };
        walls.push(Wall { a, b, kind });
    };
    for e in inst.workspace.edges() {
        push(e, WallKind::Boundary(None));
    }
    for (r, poly) in inst.polygons() {
        for e in poly.edges() {
            push(e, WallKind::Boundary(Some(r)));
        }
    }
    for (i, b) in barriers.iter().enumerate() {
        push(b.segment.clone(), WallKind::Barrier(i));
    }

    let mut xs: BTreeSet<Coord> = BTreeSet::new();
    for w in &walls {
        xs.insert(w.a.x.clone());
        xs.insert(w.b.x.clone());
    }
    let point_objects: Vec<(ShapeRef, Point)> = inst
        .shapes()
        .filter_map(|(r, s)| match (r, s) {
            (ShapeRef::Object { .. }, Shape::Point(p)) => Some((r, p.clone())),
            _ => None,
        })
        .collect();
    for (_, p) in &point_objects {
        xs.insert(p.x.clone());
    }
    // Shape and workspace edges only meet at shared vertices, so only
    // barriers can add crossings.
    for i in 0..walls.len() {
        if !matches!(walls[i].kind, WallKind::Barrier(_)) {
            continue;
        }
        for j in 0..walls.len() {
            if j == i || (matches!(walls[j].kind, WallKind::Barrier(_)) && j < i) {
                continue;
            }
            let si = Segment { a: walls[i].a.clone(), b: walls[i].b.clone() };
            let sj = Segment { a: walls[j].a.clone(), b: walls[j].b.clone() };
            match segment_intersection(&si, &sj) {
                Intersection::Point(q) => {
                    xs.insert(q.x);
                }
                Intersection::Overlap(o) => {
                    xs.insert(o.a.x);
                    xs.insert(o.b.x);
                }
                Intersection::Empty => {}
            }
        }
    }
    let xs: Vec<Coord> = xs.into_iter().collect();

    let mut vertical_at: BTreeMap<&Coord, Vec<(Coord, Coord, WallKind)>> = BTreeMap::new();
    for w in &walls {
        if w.a.x == w.b.x {
            vertical_at.entry(&w.a.x).or_default().push((w.a.y.clone(), w.b.y.clone(), w.kind));
        }
    }

    let mut traps: Vec<Trap> = Vec::new();
    // Per slab: trapezoid ids bottom to top with their (left, right) spans.
    let mut slab_traps: Vec<Vec<(usize, (Coord, Coord), (Coord, Coord))>> = Vec::new();
    for s in 0..xs.len().saturating_sub(1) {
        let (x0, x1) = (&xs[s], &xs[s + 1]);
        let xm = (x0 + x1) / int(2);
        let mut active: Vec<(Coord, usize)> = walls
            .iter()
            .enumerate()
            .filter(|(_, w)| w.a.x <= *x0 && w.b.x >= *x1 && w.a.x != w.b.x)
            .map(|(i, w)| (w.y_at(&xm), i))
            .collect();
        active.sort();
        let mut groups: Vec<(Coord, Vec<usize>)> = Vec::new();
        for (y, i) in active {
            match groups.last_mut() {
                Some((gy, g)) if *gy == y => g.push(i),
                _ => groups.push((y, vec![i])),
            }
        }
        let mut row = Vec::new();
        let mut boundary_below = 0usize;
        for g in 0..groups.len().saturating_sub(1) {
            boundary_below += groups[g].1.iter().filter(|&&i| matches!(walls[i].kind, WallKind::Boundary(_))).count();
            if boundary_below % 2 == 0 {
                continue;
            }
            let lo = &walls[groups[g].1[0]];
            let hi = &walls[groups[g + 1].1[0]];
            let sample = Point::new(xm.clone(), (&groups[g].0 + &groups[g + 1].0) / int(2));
            let id = traps.len();
            traps.push(Trap { lower: groups[g].1.clone(), upper: groups[g + 1].1.clone(), sample });
            row.push((id, (lo.y_at(x0), hi.y_at(x0)), (lo.y_at(x1), hi.y_at(x1))));
        }
        slab_traps.push(row);
    }

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); traps.len()];
    for s in 0..slab_traps.len().saturating_sub(1) {
        let x = &xs[s + 1];
        let mut covers: Vec<(Coord, Coord)> =
            vertical_at.get(x).map(|v| v.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect()).unwrap_or_default();
        covers.sort();
        let (left, right) = (&slab_traps[s], &slab_traps[s + 1]);
        let (mut i, mut j) = (0, 0);
        while i < left.len() && j < right.len() {
            let (a, _, (alo, ahi)) = &left[i];
            let (b, (blo, bhi), _) = &right[j];
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo < hi && open_stretch(lo, hi, &covers) {
                adj[*a].push(*b);
                adj[*b].push(*a);
            }
            if ahi < bhi {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    // Objects touch trapezoids along walls of positive length, unless a
    // barrier lies flush on the object there.
    let mut touches: BTreeMap<ShapeRef, BTreeSet<usize>> = BTreeMap::new();
    for (t, trap) in traps.iter().enumerate() {
        for group in [&trap.lower, &trap.upper] {
            if group.iter().any(|&w| matches!(walls[w].kind, WallKind::Barrier(_))) {
                continue;
            }
            for &w in group {
                if let WallKind::Boundary(Some(r @ ShapeRef::Object { .. })) = walls[w].kind {
                    touches.entry(r).or_default().insert(t);
                }
            }
        }
    }
    for (s, row) in slab_traps.iter().enumerate() {
        for (side_x, pick) in [(&xs[s], 0usize), (&xs[s + 1], 1usize)] {
            let Some(vs) = vertical_at.get(side_x) else { continue };
            let mut barrier_covers: Vec<(Coord, Coord)> = vs
                .iter()
                .filter(|(_, _, k)| matches!(k, WallKind::Barrier(_)))
                .map(|(a, b, _)| (a.clone(), b.clone()))
                .collect();
            barrier_covers.sort();
            for (id, l, r) in row {
                let (lo, hi) = if pick == 0 { l } else { r };
                for (a, b, kind) in vs {
                    if let WallKind::Boundary(Some(obj @ ShapeRef::Object { .. })) = kind {
                        let (lo, hi) = (a.max(lo), b.min(hi));
                        if lo < hi && open_stretch(lo, hi, &barrier_covers) {
                            touches.entry(*obj).or_default().insert(*id);
                        }
                    }
                }
            }
        }
    }
    for (r, p) in &point_objects {
        let pins: Vec<(&Segment, Side)> = barriers
            .iter()
            .flat_map(|b| b.pins.iter().filter(|(q, _)| q == p).map(move |(_, s)| (&b.segment, *s)))
            .collect();
        for (s, row) in slab_traps.iter().enumerate() {
            if p.x < xs[s] || p.x > xs[s + 1] {
                continue;
            }
            for (id, _, _) in row {
                let trap = &traps[*id];
                let lo = walls[trap.lower[0]].y_at(&p.x);
                let hi = walls[trap.upper[0]].y_at(&p.x);
                if p.y < lo || p.y > hi {
                    continue;
                }
                if pins.iter().all(|(seg, side)| side_of(seg, &trap.sample) == *side) {
                    touches.entry(*r).or_default().insert(*id);
                }
            }
        }
    }
    Decomposition { traps, adj, touches }
}

pub fn verify_separation(inst: &Instance, barriers: &[Barrier]) -> Result<VerificationReport, VerifyError> {
    for (i, b) in barriers.iter().enumerate() {
        check_barrier(inst, i, b)?;
    }
    let d = decompose(inst, barriers);
    let n = d.traps.len();
    let mut comp = vec![usize::MAX; n];
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = start;
        while let Some(u) = stack.pop() {
            for &v in &d.adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = start;
                    stack.push(v);
                }
            }
        }
    }
    let mut owner: BTreeMap<usize, ShapeRef> = BTreeMap::new();
    for (r, ts) in &d.touches {
        for &t in ts {
            let c = comp[t];
            match owner.get(&c) {
                None => {
                    owner.insert(c, *r);
                }
                Some(o) if o.class() != r.class() => {
                    let path = shortest_path(&d.adj, &d.touches[o], &d.touches[r]);
                    return Ok(VerificationReport {
                        ok: false,
                        witness: Some(Witness { first: *o, second: *r, path }),
                        regions: n,
                    });
                }
                Some(_) => {}
            }
        }
    }
    Ok(VerificationReport { ok: true, witness: None, regions: n })
}

fn shortest_path(adj: &[Vec<usize>], from: &BTreeSet<usize>, to: &BTreeSet<usize>) -> Vec<usize> {
    let mut prev = vec![usize::MAX; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut q = VecDeque::new();
    for &s in from {
        seen[s] = true;
        q.push_back(s);
    }
    while let Some(u) = q.pop_front() {
        if to.contains(&u) {
            let mut path = vec![u];
            let mut v = u;
            while prev[v] != usize::MAX {
                v = prev[v];
                path.push(v);
            }
            path.reverse();
            return path;
        }
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                prev[v] = u;
                q.push_back(v);
            }
        }
    }
    Vec::new()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("enumeration would visit {subsets} subsets, above the limit of {limit}")]
    TooLarge { subsets: u128, limit: u128 },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

pub const SUBSET_LIMIT: u128 = 10_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Smallest feasible subset of `candidates` with at most `max_size`
/// members, in lexicographic order of candidate positions within a size.
pub fn brute_force_minimum(
    inst: &Instance,
    candidates: &[CandidateSegment],
    max_size: usize,
) -> Result<Option<(usize, Vec<usize>)>, BruteForceError> {
    let n = candidates.len();
    let max_size = max_size.min(n);
    let total: u128 = (0..=max_size).map(|s| binomial(n, s)).sum();
    if total > SUBSET_LIMIT {
        return Err(BruteForceError::TooLarge { subsets: total, limit: SUBSET_LIMIT });
    }
    let barriers: Vec<Barrier> = candidates.iter().map(Barrier::from_candidate).collect();
    for size in 0..=max_size {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let chosen: Vec<Barrier> = idx.iter().map(|&i| barriers[i].clone()).collect();
            if verify_separation(inst, &chosen)?.ok {
                return Ok(Some((size, idx.iter().map(|&i| candidates[i].id).collect())));
            }
            // Next combination.
            let mut k = size;
            while k > 0 && idx[k - 1] == n - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for m in k..size {
                idx[m] = idx[m - 1] + 1;
            }
        }
    }
    Ok(None)
}
