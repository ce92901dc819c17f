//! Criterion benchmarks for the multiform operators live under `benches/`.
