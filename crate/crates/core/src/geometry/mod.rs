//! Exact planar primitives: points, segments, simple polygons and the
//! predicates everything else is built on. All arithmetic is rational, so no
//! predicate ever rounds.

mod coord;
mod polygon;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coord::{format_coord, int, parse_coord, ratio, to_f64, Coord};
pub use polygon::{point_in_polygon, segment_intersects_interior, winding_number, BBox, Polygon, Location};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("malformed coordinate {0:?}")]
    BadCoordinate(String),
    #[error("segment endpoints coincide at {0}")]
    DegenerateSegment(Point),
    #[error("polygon has fewer than three distinct non-collinear vertices")]
    DegeneratePolygon,
    #[error("polygon is not simple: {0}")]
    NotSimple(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Coord,
    pub y: Coord,
}

impl Point {
    pub fn new(x: Coord, y: Coord) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::new(int(x), int(y))
    }

    pub fn parse(x: &str, y: &str) -> Result<Self, GeometryError> {
        Ok(Self::new(parse_coord(x)?, parse_coord(y)?))
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let half = ratio(1, 2);
        Point::new((&self.x + &other.x) * &half, (&self.y + &other.y) * &half)
    }

    pub fn sub(&self, other: &Point) -> Vector {
        Vector { dx: &self.x - &other.x, dy: &self.y - &other.y }
    }

    pub fn offset(&self, v: &Vector, scale: &Coord) -> Point {
        Point::new(&self.x + &v.dx * scale, &self.y + &v.dy * scale)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }

    pub fn to_strings(&self) -> [String; 2] {
        [format_coord(&self.x), format_coord(&self.y)]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_coord(&self.x), format_coord(&self.y))
    }
}

/// A direction or displacement with exact components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    pub dx: Coord,
    pub dy: Coord,
}

impl Vector {
    pub fn new(dx: Coord, dy: Coord) -> Self {
        Self { dx, dy }
    }

    pub fn is_zero(&self) -> bool {
        self.dx.is_zero() && self.dy.is_zero()
    }

    pub fn cross(&self, other: &Vector) -> Coord {
        &self.dx * &other.dy - &self.dy * &other.dx
    }

    pub fn dot(&self, other: &Vector) -> Coord {
        &self.dx * &other.dx + &self.dy * &other.dy
    }

    /// The same direction with coprime integer components.
    pub fn primitive(&self) -> Vector {
        let l = self.dx.denom().lcm(self.dy.denom());
        let x = self.dx.numer() * (&l / self.dx.denom());
        let y = self.dy.numer() * (&l / self.dy.denom());
        let g = x.gcd(&y);
        if g.is_zero() {
            return self.clone();
        }
        Vector::new(Coord::from_integer(x / &g), Coord::from_integer(y / g))
    }

    /// Rotated a quarter turn counterclockwise.
    pub fn perp(&self) -> Vector {
        Vector::new(-self.dy.clone(), self.dx.clone())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector::new(&self.dx + &other.dx, &self.dy + &other.dy)
    }

    /// Total order by polar angle in `[0, 2π)`; `self` must be nonzero.
    pub fn angle_cmp(&self, other: &Vector) -> Ordering {
        fn half(v: &Vector) -> u8 {
            if v.dy.is_positive() || (v.dy.is_zero() && v.dx.is_positive()) {
                0
            } else {
                1
            }
        }
        half(self).cmp(&half(other)).then_with(|| {
            let c = self.cross(other);
            if c.is_positive() {
                Ordering::Less
            } else if c.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Left,
    Right,
    Collinear,
}

impl Orientation {
    pub fn from_sign(v: &Coord) -> Self {
        if v.is_positive() {
            Orientation::Left
        } else if v.is_negative() {
            Orientation::Right
        } else {
            Orientation::Collinear
        }
    }
}

/// Twice the signed area of triangle `pqr`.
pub fn cross(p: &Point, q: &Point, r: &Point) -> Coord {
    (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)
}

/// Floating approximation of a coordinate, used only to skip exact work
/// when the answer is clear.
pub(crate) fn approx(c: &Coord) -> f64 {
    let n = c.numer().to_f64().unwrap_or(f64::NAN);
    let d = c.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `a - b` as an unreduced fraction with positive denominator.
fn diff(a: &Coord, b: &Coord) -> (BigInt, BigInt) {
    (a.numer() * b.denom() - b.numer() * a.denom(), a.denom() * b.denom())
}

/// Exact sign of `(q - p) × (r - p)`.
///
/// A floating-point estimate decides whenever it clears a generous error
/// bound; otherwise the sign is computed with integers only, skipping the
/// gcd reductions that dominate rational arithmetic.
pub fn orientation(p: &Point, q: &Point, r: &Point) -> Orientation {
    let (px, py, qx, qy, rx, ry) = (approx(&p.x), approx(&p.y), approx(&q.x), approx(&q.y), approx(&r.x), approx(&r.y));
    let det = (qx - px) * (ry - py) - (qy - py) * (rx - px);
    let mag = (qx.abs() + px.abs()) * (ry.abs() + py.abs()) + (qy.abs() + py.abs()) * (rx.abs() + px.abs());
    if det.is_finite() && mag.is_finite() && det.abs() > 1e-12 * mag {
        return if det > 0.0 { Orientation::Left } else { Orientation::Right };
    }
    let (a, b) = diff(&q.x, &p.x);
    let (c, d) = diff(&r.y, &p.y);
    let (e, f) = diff(&q.y, &p.y);
    let (g, h) = diff(&r.x, &p.x);
    let v = a * c * (f * h) - e * g * (b * d);
    match v.sign() {
        Sign::Plus => Orientation::Left,
        Sign::Minus => Orientation::Right,
        Sign::NoSign => Orientation::Collinear,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeometryError> {
        if a == b {
            return Err(GeometryError::DegenerateSegment(a));
        }
        Ok(Self { a, b })
    }

    /// Same segment with endpoints in lexicographic order.
    pub fn canonical(&self) -> Segment {
        if self.a <= self.b {
            self.clone()
        } else {
            Segment { a: self.b.clone(), b: self.a.clone() }
        }
    }

    pub fn direction(&self) -> Vector {
        self.b.sub(&self.a)
    }

    pub fn midpoint(&self) -> Point {
        self.a.midpoint(&self.b)
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points([&self.a, &self.b])
    }

    /// True iff `p` lies on the closed segment.
    pub fn contains(&self, p: &Point) -> bool {
        orientation(&self.a, &self.b, p) == Orientation::Collinear && in_box(&self.a, &self.b, p)
    }

    /// True iff `p` lies on the segment strictly between its endpoints.
    pub fn contains_interior(&self, p: &Point) -> bool {
        self.contains(p) && *p != self.a && *p != self.b
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

fn in_box(a: &Point, b: &Point, p: &Point) -> bool {
    let (lx, hx) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (ly, hy) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    lx <= &p.x && &p.x <= hx && ly <= &p.y && &p.y <= hy
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Intersection {
    Empty,
    Point(Point),
    Overlap(Segment),
}

fn boxes_meet(s1: &Segment, s2: &Segment) -> bool {
    let overlap = |a0: &Coord, a1: &Coord, b0: &Coord, b1: &Coord| {
        let (alo, ahi) = (a0.min(a1), a0.max(a1));
        let (blo, bhi) = (b0.min(b1), b0.max(b1));
        alo <= bhi && blo <= ahi
    };
    overlap(&s1.a.x, &s1.b.x, &s2.a.x, &s2.b.x) && overlap(&s1.a.y, &s1.b.y, &s2.a.y, &s2.b.y)
}

/// Exact intersection of two closed segments.
pub fn segment_intersection(s1: &Segment, s2: &Segment) -> Intersection {
    intersect(s1, s2, || Line::through(s1).meet(&Line::through(s2)))
}

/// As [`segment_intersection`], reusing lines already computed through
/// each segment.
pub fn segment_intersection_on_lines(s1: &Segment, l1: &Line, s2: &Segment, l2: &Line) -> Intersection {
    intersect(s1, s2, || l1.meet(l2))
}

fn intersect(s1: &Segment, s2: &Segment, crossing: impl FnOnce() -> Option<Point>) -> Intersection {
    if !boxes_meet(s1, s2) {
        return Intersection::Empty;
    }
    let d1 = orientation(&s1.a, &s1.b, &s2.a);
    let d2 = orientation(&s1.a, &s1.b, &s2.b);
    use Orientation::*;
    if d1 == Collinear && d2 == Collinear {
        // Collinear: intersect the lexicographic intervals.
        let c1 = s1.canonical();
        let c2 = s2.canonical();
        let lo = if c1.a >= c2.a { c1.a } else { c2.a };
        let hi = if c1.b <= c2.b { c1.b } else { c2.b };
        return match lo.cmp(&hi) {
            Ordering::Less => Intersection::Overlap(Segment { a: lo, b: hi }),
            Ordering::Equal => Intersection::Point(lo),
            Ordering::Greater => Intersection::Empty,
        };
    }
    let d3 = orientation(&s2.a, &s2.b, &s1.a);
    let d4 = orientation(&s2.a, &s2.b, &s1.b);
    let touches = |u: Orientation, v: Orientation| u == Collinear || v == Collinear || u != v;
    if !touches(d1, d2) || !touches(d3, d4) {
        return Intersection::Empty;
    }
    if d1 == Collinear {
        return Intersection::Point(s2.a.clone());
    }
    if d2 == Collinear {
        return Intersection::Point(s2.b.clone());
    }
    if d3 == Collinear {
        return Intersection::Point(s1.a.clone());
    }
    if d4 == Collinear {
        return Intersection::Point(s1.b.clone());
    }
    let p = crossing().expect("properly crossing segments are not parallel");
    Intersection::Point(p)
}

/// The line `a·x + b·y = c` with coprime integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Line {
    pub fn through(s: &Segment) -> Line {
        let a = &s.b.y - &s.a.y;
        let b = &s.a.x - &s.b.x;
        let c = &a * &s.a.x + &b * &s.a.y;
        let l = a.denom().lcm(b.denom()).lcm(c.denom());
        let scale = |v: &Coord| v.numer() * (&l / v.denom());
        let (a, b, c) = (scale(&a), scale(&b), scale(&c));
        let g = a.gcd(&b).gcd(&c);
        if g.is_zero() {
            return Line { a, b, c };
        }
        Line { a: a / &g, b: b / &g, c: c / &g }
    }

    /// Common point of two non-parallel lines.
    pub fn meet(&self, other: &Line) -> Option<Point> {
        let det = &self.a * &other.b - &other.a * &self.b;
        if det.is_zero() {
            return None;
        }
        let x = &self.c * &other.b - &other.c * &self.b;
        let y = &self.a * &other.c - &other.a * &self.c;
        Some(Point::new(Coord::new(x, det.clone()), Coord::new(y, det)))
    }
}

/// Intersection of the infinite line through `p` with direction `dir` and
/// the closed segment `s`, as parameters `t` with `p + t·dir` on `s`.
/// Returns one parameter for a crossing, two for a collinear overlap.
pub fn line_segment_params(p: &Point, dir: &Vector, s: &Segment) -> Vec<Coord> {
    let ea = s.a.sub(p);
    let eb = s.b.sub(p);
    let ca = dir.cross(&ea);
    let cb = dir.cross(&eb);
    let dd = dir.dot(dir);
    if ca.is_zero() && cb.is_zero() {
        return vec![dir.dot(&ea) / &dd, dir.dot(&eb) / dd];
    }
    if (ca.is_positive() && cb.is_positive()) || (ca.is_negative() && cb.is_negative()) {
        return Vec::new();
    }
    // Point on s: a + u (b - a), u = ca / (ca - cb).
    let u = &ca / (&ca - &cb);
    let hit = s.a.offset(&s.direction(), &u);
    vec![dir.dot(&hit.sub(p)) / dd]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(p(a.0, a.1), p(b.0, b.1)).unwrap()
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(0, 1)), Orientation::Left);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(2, 0)), Orientation::Collinear);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(1, -1)), Orientation::Right);
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(segment_intersection(&seg((0, 0), (2, 2)), &seg((0, 2), (2, 0))), Intersection::Point(p(1, 1)));
        assert_eq!(segment_intersection(&seg((0, 0), (1, 0)), &seg((2, 0), (3, 0))), Intersection::Empty);
        assert_eq!(
            segment_intersection(&seg((0, 0), (2, 0)), &seg((1, 0), (3, 0))),
            Intersection::Overlap(seg((1, 0), (2, 0)))
        );
        assert_eq!(segment_intersection(&seg((0, 0), (1, 0)), &seg((1, 0), (1, 5))), Intersection::Point(p(1, 0)));
        assert_eq!(segment_intersection(&seg((0, 0), (1, 0)), &seg((1, 0), (2, 0))), Intersection::Point(p(1, 0)));
        assert_eq!(segment_intersection(&seg((0, 0), (4, 0)), &seg((2, 0), (2, 3))), Intersection::Point(p(2, 0)));
    }

    #[test]
    fn degenerate_segment_rejected() {
        assert!(Segment::new(p(1, 1), p(1, 1)).is_err());
    }

    #[test]
    fn angle_order_is_counterclockwise_from_positive_x() {
        let mut v = vec![
            Vector::new(int(0), int(-1)),
            Vector::new(int(-1), int(0)),
            Vector::new(int(1), int(1)),
            Vector::new(int(1), int(0)),
            Vector::new(int(1), int(-1)),
        ];
        v.sort_by(|a, b| a.angle_cmp(b));
        let dirs: Vec<(i64, i64)> = v
            .iter()
            .map(|w| (num_traits::ToPrimitive::to_i64(&w.dx.to_integer()).unwrap(), num_traits::ToPrimitive::to_i64(&w.dy.to_integer()).unwrap()))
            .collect();
        assert_eq!(dirs, vec![(1, 0), (1, 1), (-1, 0), (0, -1), (1, -1)]);
    }

    #[test]
    fn line_params_cover_crossing_and_overlap() {
        let origin = p(0, 0);
        let dir = Vector::new(int(2), int(0));
        assert_eq!(line_segment_params(&origin, &dir, &seg((3, -1), (3, 1))), vec![ratio(3, 2)]);
        assert_eq!(line_segment_params(&origin, &dir, &seg((4, 0), (6, 0))), vec![int(2), int(3)]);
        assert!(line_segment_params(&origin, &dir, &seg((3, 1), (4, 2))).is_empty());
    }

    fn small_point() -> impl Strategy<Value = Point> {
        (-50i64..50, 1i64..8, -50i64..50, 1i64..8).prop_map(|(a, b, c, d)| Point::new(ratio(a, b), ratio(c, d)))
    }

    proptest! {
        #[test]
        fn orientation_antisymmetric_and_translation_invariant(
            a in small_point(), b in small_point(), c in small_point(), t in small_point()
        ) {
            let o = orientation(&a, &b, &c);
            let swapped = orientation(&a, &c, &b);
            match o {
                Orientation::Left => prop_assert_eq!(swapped, Orientation::Right),
                Orientation::Right => prop_assert_eq!(swapped, Orientation::Left),
                Orientation::Collinear => prop_assert_eq!(swapped, Orientation::Collinear),
            }
            let shift = |q: &Point| Point::new(&q.x + &t.x, &q.y + &t.y);
            prop_assert_eq!(orientation(&shift(&a), &shift(&b), &shift(&c)), o);
        }

        #[test]
        fn intersection_is_symmetric(a in small_point(), b in small_point(), c in small_point(), d in small_point()) {
            prop_assume!(a != b && c != d);
            let s1 = Segment::new(a, b).unwrap();
            let s2 = Segment::new(c, d).unwrap();
            let norm = |i: Intersection| match i {
                Intersection::Overlap(s) => Intersection::Overlap(s.canonical()),
                other => other,
            };
            prop_assert_eq!(norm(segment_intersection(&s1, &s2)), norm(segment_intersection(&s2, &s1)));
        }

        #[test]
        fn crossing_point_lies_on_both(a in small_point(), b in small_point(), c in small_point(), d in small_point()) {
            prop_assume!(a != b && c != d);
            let s1 = Segment::new(a, b).unwrap();
            let s2 = Segment::new(c, d).unwrap();
            if let Intersection::Point(x) = segment_intersection(&s1, &s2) {
                prop_assert!(s1.contains(&x));
                prop_assert!(s2.contains(&x));
            }
        }
    }
}
