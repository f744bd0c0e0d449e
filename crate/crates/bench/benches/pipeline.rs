use std::hint::black_box;

use barrier_core::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn instance(kind: GenKind, sets: usize, objects: usize) -> Instance {
    generate(&GenSpec::new(kind, sets, objects, 0)).expect("benchmark instance")
}

fn candidates(c: &mut Criterion) {
    let mut group = c.benchmark_group("candidates");
    for (kind, objects) in [(GenKind::RandomPoints, 3), (GenKind::TspPolygons, 2)] {
        let inst = instance(kind, 2, objects);
        group.bench_with_input(BenchmarkId::new("bitangent", format!("{kind}-2x{objects}")), &inst, |b, inst| {
            b.iter(|| enumerate_bitangents(black_box(inst)))
        });
        group.bench_with_input(BenchmarkId::new("sampled:4", format!("{kind}-2x{objects}")), &inst, |b, inst| {
            b.iter(|| enumerate_sampled_tangents(black_box(inst), 4))
        });
    }
    group.finish();
}

fn arrangement(c: &mut Criterion) {
    let mut group = c.benchmark_group("arrangement");
    group.sample_size(10);
    for objects in 1..=3 {
        let inst = instance(GenKind::RandomPoints, 2, objects);
        let cands = enumerate_bitangents(&inst);
        group.bench_with_input(BenchmarkId::from_parameter(format!("random-points-2x{objects}")), &cands, |b, cands| {
            b.iter(|| build_arrangement(&inst, black_box(cands)).unwrap())
        });
    }
    group.finish();
}

fn ilp(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for (kind, sets, objects) in [(GenKind::RandomPoints, 2, 3), (GenKind::RandomPoints, 3, 2), (GenKind::GridSquares, 3, 2)] {
        let inst = instance(kind, sets, objects);
        let arr = build_arrangement(&inst, &enumerate_bitangents(&inst)).unwrap();
        let model = build_model(&arr, inst.num_sets());
        group.bench_with_input(BenchmarkId::from_parameter(format!("{kind}-{sets}x{objects}")), &model, |b, model| {
            b.iter(|| solve(black_box(model), None))
        });
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("end_to_end");
    group.sample_size(10);
    for (kind, objects) in [(GenKind::RandomPoints, 2), (GenKind::PointsAmongPolygons, 1), (GenKind::TspPolygons, 1)] {
        let inst = instance(kind, 2, objects);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{kind}-2x{objects}")), &inst, |b, inst| {
            b.iter(|| solve_instance(black_box(inst), CandidateMode::Bitangent, None).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, candidates, arrangement, ilp, end_to_end);
criterion_main!(benches);
