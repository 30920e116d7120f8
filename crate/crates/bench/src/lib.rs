//! Criterion benchmarks for `tandem-core`; see `benches/core.rs`.
