//! Criterion benchmarks for `hedgehog-core`; see `benches/engine.rs`.
