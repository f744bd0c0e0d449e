//! Criterion benchmarks for barrier-core; see `benches/pipeline.rs`.
