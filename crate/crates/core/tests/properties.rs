use barrier_core::files::{read_barriers, read_solution, write_barriers, write_solution};
use barrier_core::geometry::{orientation, segment_intersection, Intersection, Orientation};
use barrier_core::*;
use num_traits::Signed;
use proptest::prelude::*;

fn cross_sign(a: &Point, b: &Point, c: &Point) -> i32 {
    let v = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn between(a: &Point, b: &Point, p: &Point) -> bool {
    a.x.clone().min(b.x.clone()) <= p.x
        && p.x <= a.x.clone().max(b.x.clone())
        && a.y.clone().min(b.y.clone()) <= p.y
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Closed segments `ab` and `cd` share a point.
fn touch(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let (d1, d2) = (cross_sign(a, b, c), cross_sign(a, b, d));
    let (d3, d4) = (cross_sign(c, d, a), cross_sign(c, d, b));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && between(a, b, c))
        || (d2 == 0 && between(a, b, d))
        || (d3 == 0 && between(c, d, a))
        || (d4 == 0 && between(c, d, b))
}

fn assert_simple(poly: &Polygon, what: &str) {
    let v = poly.vertices();
    let n = v.len();
    assert!(n >= 3, "{what}: {n} vertices");
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (a, b, c, d) = (&v[i], &v[(i + 1) % n], &v[j], &v[(j + 1) % n]);
            if adjacent {
                // Consecutive edges meet only at their shared vertex.
                let shared = if j == i + 1 { b } else { a };
                let (far1, far2) = if j == i + 1 { (a, d) } else { (b, c) };
                assert!(shared != far1 && shared != far2, "{what}: repeated vertex");
                assert!(
                    cross_sign(far1, shared, far2) != 0 || (!between(far1, shared, far2) && !between(far2, shared, far1)),
                    "{what}: edges {i} and {j} fold back"
                );
            } else {
                assert!(!touch(a, b, c, d), "{what}: edges {i} and {j} meet");
            }
        }
    }
}

#[test]
fn tsp_polygons_are_simple() {
    for seed in 0..1000 {
        let inst = generate(&GenSpec::new(GenKind::TspPolygons, 2, 2, seed)).unwrap();
        for (r, poly) in inst.polygons() {
            assert_simple(poly, &format!("seed {seed} {r}"));
        }
    }
}

#[test]
fn generated_instances_validate() {
    for kind in GenKind::ALL {
        for seed in 0..20 {
            let inst = generate(&GenSpec::new(kind, 3, 2, seed)).unwrap();
            assert!(inst.validate().is_empty(), "{kind} seed {seed}: {:?}", inst.validate());
            assert_eq!(inst.num_sets(), 3);
            assert!(inst.sets.iter().all(|s| s.len() == 2));
            assert_eq!(inst.obstacles.len(), 6);
        }
    }
}

#[test]
fn same_seed_same_instance() {
    for kind in GenKind::ALL {
        let a = generate(&GenSpec::new(kind, 2, 3, 42)).unwrap();
        let b = generate(&GenSpec::new(kind, 2, 3, 42)).unwrap();
        let c = generate(&GenSpec::new(kind, 2, 3, 43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

#[test]
fn instance_text_round_trips() {
    for kind in GenKind::ALL {
        let inst = generate(&GenSpec::new(kind, 2, 2, 5)).unwrap();
        let text = write_instance(&inst);
        let back = read_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(write_instance(&back), text);
    }
}

#[test]
fn solution_and_barrier_files_round_trip() {
    let inst = generate(&GenSpec::new(GenKind::GridSquares, 2, 2, 3)).unwrap();
    let out = solve_instance(&inst, CandidateMode::Bitangent, None).unwrap();
    assert!(out.verified());
    let text = write_solution(&out, true);
    let doc = read_solution(&text).unwrap();
    assert_eq!(doc.objective, out.solution.objective_value);
    assert!(doc.wall_clock_seconds.is_some());

    let from_solution = read_barriers(&text).unwrap();
    assert_eq!(from_solution, out.barriers);
    assert_eq!(read_barriers(&write_barriers(&out.barriers)).unwrap(), out.barriers);
    assert!(verify_separation(&inst, &from_solution).unwrap().ok);
}

#[test]
fn extra_barriers_keep_separation() {
    for seed in 0..10 {
        let inst = generate(&GenSpec::new(GenKind::RandomPoints, 2, 3, seed)).unwrap();
        let out = solve_instance(&inst, CandidateMode::Bitangent, None).unwrap();
        let mut barriers = out.barriers.clone();
        assert!(verify_separation(&inst, &barriers).unwrap().ok);
        for c in out.candidates.iter().filter(|c| !out.solution.selected.contains(&c.id)).take(5) {
            barriers.push(Barrier::from_candidate(c));
            assert!(verify_separation(&inst, &barriers).unwrap().ok, "seed {seed}");
        }
        if out.solution.objective_value > 0 {
            // Dropping any chosen barrier from an optimal set breaks it.
            for skip in 0..out.barriers.len() {
                let fewer: Vec<Barrier> =
                    out.barriers.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, b)| b.clone()).collect();
                assert!(!verify_separation(&inst, &fewer).unwrap().ok, "seed {seed} without {skip}");
            }
        }
    }
}

#[test]
fn removing_an_object_never_raises_the_optimum() {
    for seed in 0..10 {
        let full = generate(&GenSpec::new(GenKind::RandomPoints, 2, 3, seed)).unwrap();
        let mut reduced = full.clone();
        reduced.sets[1].pop();
        let a = solve_instance(&full, CandidateMode::Bitangent, None).unwrap();
        let cands = enumerate_bitangents(&full);
        let b = barrier_core::pipeline::solve_with_candidates(
            &reduced,
            CandidateMode::Bitangent,
            cands,
            None,
            Default::default(),
        )
        .unwrap();
        assert!(b.solution.objective_value <= a.solution.objective_value, "seed {seed}");
    }
}

fn small_point() -> impl Strategy<Value = Point> {
    (-20i64..20, -20i64..20).prop_map(|(x, y)| Point::from_ints(x, y))
}

fn i128_cross(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    let (a, b, c) = ((a.0 as i128, a.1 as i128), (b.0 as i128, b.1 as i128), (c.0 as i128, c.1 as i128));
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

proptest! {
    #[test]
    fn orientation_matches_integer_cross(
        a in (-1_000_000_000i64..1_000_000_000, -1_000_000_000i64..1_000_000_000),
        b in (-1_000_000_000i64..1_000_000_000, -1_000_000_000i64..1_000_000_000),
        t in -3i64..3,
        c in (-1_000_000_000i64..1_000_000_000, -1_000_000_000i64..1_000_000_000),
        collinear in any::<bool>(),
    ) {
        // Half the cases sit exactly on the line through a and b.
        let c = if collinear { (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)) } else { c };
        let pt = |q: (i64, i64)| Point::from_ints(q.0, q.1);
        let expected = match i128_cross(a, b, c).signum() {
            1 => Orientation::Left,
            -1 => Orientation::Right,
            _ => Orientation::Collinear,
        };
        prop_assert_eq!(orientation(&pt(a), &pt(b), &pt(c)), expected);
    }

    #[test]
    fn intersection_agrees_with_touch_test(a in small_point(), b in small_point(), c in small_point(), d in small_point()) {
        prop_assume!(a != b && c != d);
        let s1 = Segment::new(a.clone(), b.clone()).unwrap();
        let s2 = Segment::new(c.clone(), d.clone()).unwrap();
        let hit = segment_intersection(&s1, &s2);
        prop_assert_eq!(!matches!(hit, Intersection::Empty), touch(&a, &b, &c, &d));
        match hit {
            Intersection::Point(p) => {
                prop_assert_eq!(cross_sign(&a, &b, &p), 0);
                prop_assert_eq!(cross_sign(&c, &d, &p), 0);
                prop_assert!(between(&a, &b, &p) && between(&c, &d, &p));
            }
            Intersection::Overlap(o) => {
                prop_assert_eq!(cross_sign(&a, &b, &c), 0);
                prop_assert_eq!(cross_sign(&a, &b, &d), 0);
                prop_assert!(between(&a, &b, &o.a) && between(&c, &d, &o.b));
            }
            Intersection::Empty => {}
        }
        prop_assert_eq!(
            std::mem::discriminant(&segment_intersection(&s1, &s2)),
            std::mem::discriminant(&segment_intersection(&s2, &s1))
        );
    }
}
