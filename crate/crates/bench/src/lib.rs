//! Criterion benchmarks for the `tflab` kernels. See `benches/kernels.rs`.
