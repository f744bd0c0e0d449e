//! Seeded random instance families.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`),
//! so a seed reproduces the same instance on every platform. Defaults: the
//! workspace is the square `[0, E]²` (E = 100 unless overridden), random
//! coordinates are multiples of `E / 100000`, and polygon vertices are drawn
//! from a disk of radius `0.06·E` around a uniformly placed center.
//!
//! Shapes are placed one at a time (all objects of set 0, then set 1, …,
//! then obstacles); a shape that touches the workspace boundary or an
//! earlier shape is redrawn, up to [`MAX_ATTEMPTS`] times.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{shapes_touch, validate, Instance, Shape};
use crate::geometry::{int, ratio, to_f64, Coord, Point, Polygon};

pub const MAX_ATTEMPTS: usize = 1000;
const GRID: usize = 7;
const QUANTA: i64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    /// Point objects and point obstacles.
    RandomPoints,
    /// Point objects among random polygon obstacles.
    PointsAmongPolygons,
    /// Random TSP-tour polygons as objects and obstacles.
    TspPolygons,
    /// Half-pitch squares centered in distinct cells of a 7×7 grid.
    GridSquares,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [GenKind::RandomPoints, GenKind::PointsAmongPolygons, GenKind::TspPolygons, GenKind::GridSquares];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::RandomPoints => "random-points",
            GenKind::PointsAmongPolygons => "points-polygons",
            GenKind::TspPolygons => "tsp-polygons",
            GenKind::GridSquares => "grid-squares",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown instance kind {s:?} (expected one of random-points, points-polygons, tsp-polygons, grid-squares)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub num_sets: usize,
    pub objects_per_set: usize,
    pub obstacles_per_set: usize,
    pub seed: u64,
    pub workspace_extent: Coord,
}

impl GenSpec {
    /// The benchmark convention: as many obstacles per set as objects.
    pub fn new(kind: GenKind, num_sets: usize, objects_per_set: usize, seed: u64) -> Self {
        Self { kind, num_sets, objects_per_set, obstacles_per_set: objects_per_set, seed, workspace_extent: int(100) }
    }

    pub fn total_shapes(&self) -> usize {
        self.num_sets * (self.objects_per_set + self.obstacles_per_set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("invalid generator spec: {0}")]
    BadSpec(String),
    #[error("could not place shape {placed} of {total} after {MAX_ATTEMPTS} attempts")]
    GenerationFailed { placed: usize, total: usize },
}

struct Sampler {
    rng: ChaCha8Rng,
    extent: Coord,
}

impl Sampler {
    /// Uniform multiple of `extent / QUANTA` in `[lo, hi]` (fractions of the extent).
    fn coord(&mut self, lo: &Coord, hi: &Coord) -> Coord {
        let q = BigRational::from_integer(BigInt::from(QUANTA));
        let a = (lo * &q).ceil().to_integer();
        let b = (hi * &q).floor().to_integer();
        let a: i64 = a.try_into().expect("quantized coordinate fits i64");
        let b: i64 = b.try_into().expect("quantized coordinate fits i64");
        let k = self.rng.gen_range(a..=b);
        ratio(k, QUANTA) * &self.extent
    }

    fn point_in_box(&mut self, lo: &Coord, hi: &Coord) -> Point {
        let x = self.coord(lo, hi);
        let y = self.coord(lo, hi);
        Point::new(x, y)
    }

    fn random_point(&mut self) -> Point {
        self.point_in_box(&ratio(1, 100), &ratio(99, 100))
    }

    fn tsp_polygon(&mut self) -> Option<Polygon> {
        let radius = ratio(6, 100);
        let lo = &radius + ratio(1, 100);
        let hi = ratio(1, 1) - &lo;
        let center = self.point_in_box(&lo, &hi);
        let count = self.rng.gen_range(3..=6);
        let r_abs = &radius * &self.extent;
        let r2 = &r_abs * &r_abs;
        let mut pts = Vec::with_capacity(count);
        while pts.len() < count {
            let dx = self.coord(&-radius.clone(), &radius);
            let dy = self.coord(&-radius.clone(), &radius);
            if &dx * &dx + &dy * &dy <= r2 {
                pts.push(Point::new(&center.x + dx, &center.y + dy));
            }
        }
        Polygon::new(shortest_tour(&pts)).ok()
    }
}

/// Orders the points along a shortest closed tour by exhaustive search.
/// Ties in length go to the lexicographically smallest index sequence.
pub(crate) fn shortest_tour(pts: &[Point]) -> Vec<Point> {
    let n = pts.len();
    let f: Vec<(f64, f64)> = pts.iter().map(|p| (to_f64(&p.x), to_f64(&p.y))).collect();
    let dist = |a: usize, b: usize| ((f[a].0 - f[b].0).powi(2) + (f[a].1 - f[b].1).powi(2)).sqrt();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    permute(&mut rest, 0, &mut |perm| {
        let mut order = Vec::with_capacity(n);
        order.push(0);
        order.extend_from_slice(perm);
        let len: f64 = (0..n).map(|i| dist(order[i], order[(i + 1) % n])).sum();
        let better = match &best {
            None => true,
            Some((bl, bo)) => len < bl - 1e-9 || ((len - bl).abs() <= 1e-9 && order < *bo),
        };
        if better {
            best = Some((len, order));
        }
    });
    let order = best.map(|b| b.1).unwrap_or_default();
    order.into_iter().map(|i| pts[i].clone()).collect()
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

fn square_workspace(extent: &Coord) -> Polygon {
    let z = int(0);
    Polygon::new(vec![
        Point::new(z.clone(), z.clone()),
        Point::new(extent.clone(), z.clone()),
        Point::new(extent.clone(), extent.clone()),
        Point::new(z, extent.clone()),
    ])
    .expect("square workspace")
}

pub fn generate(spec: &GenSpec) -> Result<Instance, GenerationError> {
    if spec.num_sets == 0 {
        return Err(GenerationError::BadSpec("at least one set is required".into()));
    }
    if spec.workspace_extent <= int(0) {
        return Err(GenerationError::BadSpec("workspace extent must be positive".into()));
    }
    if spec.kind == GenKind::GridSquares && spec.total_shapes() > GRID * GRID {
        return Err(GenerationError::BadSpec(format!(
            "{} squares do not fit on a {GRID}x{GRID} grid",
            spec.total_shapes()
        )));
    }
    let mut sampler = Sampler { rng: ChaCha8Rng::seed_from_u64(spec.seed), extent: spec.workspace_extent.clone() };
    let workspace = square_workspace(&spec.workspace_extent);

    let total_objects = spec.num_sets * spec.objects_per_set;
    let total = spec.total_shapes();
    let mut placed: Vec<Shape> = Vec::with_capacity(total);

    if spec.kind == GenKind::GridSquares {
        let mut cells: Vec<usize> = (0..GRID * GRID).collect();
        for i in 0..total {
            let j = sampler.rng.gen_range(i..cells.len());
            cells.swap(i, j);
        }
        let pitch = &spec.workspace_extent / int(GRID as i64);
        let quarter = &pitch / int(4);
        for &cell in &cells[..total] {
            let (col, row) = ((cell % GRID) as i64, (cell / GRID) as i64);
            let cx = &pitch * int(col) + &pitch / int(2);
            let cy = &pitch * int(row) + &pitch / int(2);
            let corners = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
                .iter()
                .map(|&(sx, sy)| Point::new(&cx + &quarter * int(sx), &cy + &quarter * int(sy)))
                .collect();
            placed.push(Shape::Polygon(Polygon::new(corners).expect("grid square")));
        }
    } else {
        for i in 0..total {
            let is_object = i < total_objects;
            let mut ok = false;
            for _ in 0..MAX_ATTEMPTS {
                let shape = match (spec.kind, is_object) {
                    (GenKind::RandomPoints, _) | (GenKind::PointsAmongPolygons, true) => Some(Shape::Point(sampler.random_point())),
                    _ => sampler.tsp_polygon().map(Shape::Polygon),
                };
                let Some(shape) = shape else { continue };
                if placed.iter().any(|other| shapes_touch(other, &shape)) {
                    continue;
                }
                placed.push(shape);
                ok = true;
                break;
            }
            if !ok {
                return Err(GenerationError::GenerationFailed { placed: i, total });
            }
        }
    }

    let mut it = placed.into_iter();
    let sets = (0..spec.num_sets).map(|_| it.by_ref().take(spec.objects_per_set).collect()).collect();
    let obstacles = it.collect();
    let inst = Instance { workspace, sets, obstacles };
    debug_assert!(validate(&inst).is_empty());
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::write_instance;

    #[test]
    fn grid_squares_are_half_pitch_on_distinct_cells() {
        let spec = GenSpec { obstacles_per_set: 1, ..GenSpec::new(GenKind::GridSquares, 2, 1, 7) };
        let inst = generate(&spec).unwrap();
        let shapes: Vec<&Polygon> = inst.polygons().map(|(_, p)| p).collect();
        assert_eq!(shapes.len(), 4);
        let pitch = ratio(100, 7);
        let mut centers = Vec::new();
        for sq in shapes {
            let v = sq.vertices();
            assert_eq!(v.len(), 4);
            assert_eq!(&v[1].x - &v[0].x, &pitch / int(2));
            assert_eq!(&v[2].y - &v[1].y, &pitch / int(2));
            let cx = (&v[0].x + &v[2].x) / int(2);
            let cy = (&v[0].y + &v[2].y) / int(2);
            // Center sits at the middle of a grid cell.
            assert!((&cx / &pitch - ratio(1, 2)).is_integer());
            assert!((&cy / &pitch - ratio(1, 2)).is_integer());
            centers.push((cx, cy));
        }
        centers.sort();
        centers.dedup();
        assert_eq!(centers.len(), 4);
        assert!(validate(&inst).is_empty());
    }

    #[test]
    fn tsp_polygons_have_three_to_six_vertices() {
        for seed in 0..20 {
            let inst = generate(&GenSpec::new(GenKind::TspPolygons, 2, 3, seed)).unwrap();
            assert_eq!(inst.polygons().count(), 12);
            for (_, p) in inst.polygons() {
                assert!((3..=6).contains(&p.len()), "seed {seed}: {} vertices", p.len());
            }
            assert!(validate(&inst).is_empty());
        }
    }

    #[test]
    fn single_random_point() {
        let spec = GenSpec { obstacles_per_set: 0, ..GenSpec::new(GenKind::RandomPoints, 1, 1, 3) };
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.sets[0].len(), 1);
        assert!(inst.obstacles.is_empty());
        assert!(validate(&inst).is_empty());
    }

    #[test]
    fn generation_is_seed_stable() {
        for kind in GenKind::ALL {
            let spec = GenSpec::new(kind, 3, 2, 42);
            let a = write_instance(&generate(&spec).unwrap());
            let b = write_instance(&generate(&spec).unwrap());
            assert_eq!(a, b);
        }
        let a = generate(&GenSpec::new(GenKind::RandomPoints, 2, 2, 1)).unwrap();
        let b = generate(&GenSpec::new(GenKind::RandomPoints, 2, 2, 2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn overcrowded_grid_rejected() {
        let spec = GenSpec::new(GenKind::GridSquares, 5, 5, 1);
        assert!(matches!(generate(&spec), Err(GenerationError::BadSpec(_))));
    }

    #[test]
    fn overcrowded_polygons_fail_after_bounded_attempts() {
        let spec = GenSpec::new(GenKind::TspPolygons, 40, 20, 1);
        assert!(matches!(generate(&spec), Err(GenerationError::GenerationFailed { .. })));
    }

    #[test]
    fn tour_of_square_corners_is_the_perimeter() {
        let pts: Vec<Point> = [(0, 0), (2, 2), (2, 0), (0, 2)].iter().map(|&(x, y)| Point::from_ints(x, y)).collect();
        let tour = shortest_tour(&pts);
        let poly = Polygon::new(tour).unwrap();
        assert_eq!(poly.area2(), int(8));
    }
}
