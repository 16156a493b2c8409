//! Criterion benchmarks for the twinch models; see `benches/`.
