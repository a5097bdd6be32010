//! Benchmark crate; see the `benches/` targets.
