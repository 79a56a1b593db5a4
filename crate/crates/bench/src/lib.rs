//! Criterion benchmarks for `ionscatter-core` live in `benches/`.
