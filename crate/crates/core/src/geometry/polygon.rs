use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::{orientation, segment_intersection, Coord, GeometryError, Intersection, Orientation, Point, Segment};

/// Axis-aligned bounding box, used only to skip exact tests early.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> BBox {
        let mut it = points.into_iter();
        let first = it.next().expect("bounding box of no points");
        let (mut lx, mut ly, mut hx, mut hy) = (&first.x, &first.y, &first.x, &first.y);
        for p in it {
            if p.x < *lx {
                lx = &p.x;
            }
            if p.x > *hx {
                hx = &p.x;
            }
            if p.y < *ly {
                ly = &p.y;
            }
            if p.y > *hy {
                hy = &p.y;
            }
        }
        BBox { min: Point::new(lx.clone(), ly.clone()), max: Point::new(hx.clone(), hy.clone()) }
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min.x <= other.max.x && other.min.x <= self.max.x && self.min.y <= other.max.y && other.min.y <= self.max.y
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.min.x <= p.x && p.x <= self.max.x && self.min.y <= p.y && p.y <= self.max.y
    }
}

/// A simple polygon stored counterclockwise, with collinear runs merged and
/// the lexicographically smallest vertex first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polygon {
    vertices: Vec<Point>,
    bbox: BBox,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        let mut v = vertices;
        v.dedup();
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        // Merge collinear runs; a collinear reversal is a spike.
        let mut changed = true;
        while changed && v.len() >= 3 {
            changed = false;
            let n = v.len();
            for i in 0..n {
                let prev = &v[(i + n - 1) % n];
                let cur = &v[i];
                let next = &v[(i + 1) % n];
                if orientation(prev, cur, next) == Orientation::Collinear {
                    let between = Segment { a: prev.clone(), b: next.clone() }.contains_interior(cur);
                    if !between {
                        return Err(GeometryError::NotSimple(format!("spike at vertex {cur}")));
                    }
                    v.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        if v.len() < 3 {
            return Err(GeometryError::DegeneratePolygon);
        }
        check_simple(&v)?;
        let area = signed_area2(&v);
        if area.is_zero() {
            return Err(GeometryError::DegeneratePolygon);
        }
        if area.is_negative() {
            v.reverse();
        }
        let start = v.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
        v.rotate_left(start);
        let bbox = BBox::of_points(&v);
        Ok(Self { vertices: v, bbox })
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Previous and next vertex around vertex `i`.
    pub fn neighbors(&self, i: usize) -> (&Point, &Point) {
        let n = self.vertices.len();
        (&self.vertices[(i + n - 1) % n], &self.vertices[(i + 1) % n])
    }

    /// Edges in counterclockwise order; edge `i` runs from vertex `i` to `i + 1`.
    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment { a: self.vertices[i].clone(), b: self.vertices[(i + 1) % n].clone() })
    }

    pub fn bbox(&self) -> &BBox {
        &self.bbox
    }

    /// True iff the interior angle at vertex `i` exceeds π.
    pub fn is_reflex(&self, i: usize) -> bool {
        let (prev, next) = self.neighbors(i);
        orientation(prev, &self.vertices[i], next) == Orientation::Right
    }

    /// Twice the (positive) area.
    pub fn area2(&self) -> Coord {
        signed_area2(&self.vertices)
    }
}

pub(crate) fn signed_area2(v: &[Point]) -> Coord {
    let n = v.len();
    let mut acc = Coord::zero();
    for i in 0..n {
        let a = &v[i];
        let b = &v[(i + 1) % n];
        acc += &a.x * &b.y - &b.x * &a.y;
    }
    acc
}

fn check_simple(v: &[Point]) -> Result<(), GeometryError> {
    let n = v.len();
    let edge = |i: usize| Segment { a: v[i].clone(), b: v[(i + 1) % n].clone() };
    for i in 0..n {
        let ei = edge(i);
        for j in (i + 1)..n {
            let ej = edge(j);
            let hit = segment_intersection(&ei, &ej);
            let adjacent_shared = if j == i + 1 {
                Some(&v[j])
            } else if i == 0 && j == n - 1 {
                Some(&v[0])
            } else {
                None
            };
            let ok = match (&hit, adjacent_shared) {
                (Intersection::Empty, None) => true,
                (Intersection::Point(q), Some(shared)) => q == shared,
                _ => false,
            };
            if !ok {
                return Err(GeometryError::NotSimple(format!("edges {ei} and {ej} intersect")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Winding number of the closed chain `cycle` around `p`. `p` must not lie
/// on the chain. Chains may be weakly simple (edges traversed twice).
pub fn winding_number(p: &Point, cycle: &[Point]) -> i64 {
    let n = cycle.len();
    let mut wn = 0;
    for i in 0..n {
        let a = &cycle[i];
        let b = &cycle[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && orientation(a, b, p) == Orientation::Left {
                wn += 1;
            }
        } else if b.y <= p.y && orientation(a, b, p) == Orientation::Right {
            wn -= 1;
        }
    }
    wn
}

pub fn point_in_polygon(p: &Point, poly: &Polygon) -> Location {
    if !poly.bbox().contains(p) {
        return Location::Outside;
    }
    if poly.edges().any(|e| e.contains(p)) {
        return Location::Boundary;
    }
    if winding_number(p, poly.vertices()) != 0 {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// True iff the open segment meets the open interior of `poly`.
pub fn segment_intersects_interior(s: &Segment, poly: &Polygon) -> bool {
    if !s.bbox().intersects(poly.bbox()) {
        return false;
    }
    let mut stops = vec![s.a.clone(), s.b.clone()];
    for e in poly.edges() {
        match segment_intersection(s, &e) {
            Intersection::Empty => {}
            Intersection::Point(q) => stops.push(q),
            Intersection::Overlap(o) => {
                stops.push(o.a);
                stops.push(o.b);
            }
        }
    }
    // Points on a segment are totally ordered lexicographically.
    let forward = s.a < s.b;
    stops.sort_by(|x, y| if forward { x.cmp(y) } else { y.cmp(x) });
    stops.dedup();
    stops.windows(2).any(|w| {
        debug_assert!(w[0].cmp(&w[1]) != Ordering::Equal);
        point_in_polygon(&w[0].midpoint(&w[1]), poly) == Location::Inside
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ratio;

    fn unit_square() -> Polygon {
        Polygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
    }

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn point_in_polygon_examples() {
        let sq = unit_square();
        let half = ratio(1, 2);
        assert_eq!(point_in_polygon(&Point::new(half.clone(), half.clone()), &sq), Location::Inside);
        assert_eq!(point_in_polygon(&Point::new(ratio(0, 1), half), &sq), Location::Boundary);
        assert_eq!(point_in_polygon(&p(2, 2), &sq), Location::Outside);
    }

    #[test]
    fn vertices_are_on_boundary() {
        let poly = Polygon::from_ints(&[(0, 0), (5, 0), (5, 5), (3, 1), (0, 5)]).unwrap();
        for v in poly.vertices() {
            assert_eq!(point_in_polygon(v, &poly), Location::Boundary);
        }
    }

    #[test]
    fn interior_crossing_examples() {
        let sq = unit_square();
        let half = ratio(1, 2);
        let graze = Segment::new(p(-1, 0), p(2, 0)).unwrap();
        assert!(!segment_intersects_interior(&graze, &sq));
        let through = Segment::new(Point::new(ratio(-1, 1), half.clone()), Point::new(ratio(2, 1), half)).unwrap();
        assert!(segment_intersects_interior(&through, &sq));
        let left = Segment::new(p(-1, -1), p(-1, 2)).unwrap();
        assert!(!segment_intersects_interior(&left, &sq));
        let diagonal = Segment::new(p(0, 0), p(1, 1)).unwrap();
        assert!(segment_intersects_interior(&diagonal, &sq));
        let corner_touch = Segment::new(p(-1, 1), p(1, -1)).unwrap();
        assert!(!segment_intersects_interior(&corner_touch, &sq));
    }

    #[test]
    fn reflex_corner_chord_enters_interior() {
        // L-shape; the chord between the two arm tips passes outside, the
        // one across the notch passes inside.
        let l = Polygon::from_ints(&[(0, 0), (4, 0), (4, 1), (1, 1), (1, 4), (0, 4)]).unwrap();
        let outside = Segment::new(p(4, 1), p(1, 4)).unwrap();
        assert!(!segment_intersects_interior(&outside, &l));
        let inside = Segment::new(p(0, 0), p(4, 1)).unwrap();
        assert!(segment_intersects_interior(&inside, &l));
        let cut = Segment::new(p(2, 0), p(0, 2)).unwrap();
        assert!(segment_intersects_interior(&cut, &l));
    }

    #[test]
    fn normalization_merges_collinear_and_orients_ccw() {
        let cw = Polygon::from_ints(&[(0, 1), (1, 1), (1, 0), (0, 0), (0, 0)]).unwrap();
        assert_eq!(cw, unit_square());
        let with_midpoints = Polygon::from_ints(&[(0, 0), (1, 0), (2, 0), (2, 2), (0, 2), (0, 1)]).unwrap();
        assert_eq!(with_midpoints.vertices(), &[p(0, 0), p(2, 0), p(2, 2), p(0, 2)]);
    }

    #[test]
    fn rejects_bowtie_spike_and_degenerate() {
        assert!(matches!(Polygon::from_ints(&[(0, 0), (2, 2), (2, 0), (0, 2)]), Err(GeometryError::NotSimple(_))));
        assert!(matches!(Polygon::from_ints(&[(0, 0), (2, 0), (1, 0), (1, 1)]), Err(GeometryError::NotSimple(_))));
        assert!(matches!(Polygon::from_ints(&[(0, 0), (1, 1), (2, 2)]), Err(_)));
        assert!(matches!(Polygon::from_ints(&[(0, 0), (1, 1)]), Err(GeometryError::DegeneratePolygon)));
    }

    #[test]
    fn winding_handles_doubled_bridge() {
        // Square traced with a bridge edge out to (3,0) and back.
        let cycle = vec![p(0, 0), p(2, 0), p(3, 0), p(2, 0), p(2, 2), p(0, 2)];
        assert_ne!(winding_number(&Point::new(ratio(1, 1), ratio(1, 1)), &cycle), 0);
        assert_eq!(winding_number(&Point::new(ratio(5, 2), ratio(1, 1)), &cycle), 0);
    }
}
