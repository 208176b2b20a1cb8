//! Criterion benchmarks for the verifiers live in `benches/`.
