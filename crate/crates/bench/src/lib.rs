//! Criterion benchmarks for `huffcensus-core`; see `benches/census.rs`.
