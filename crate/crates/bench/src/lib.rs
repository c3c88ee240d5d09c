//! Benchmarks for `geonorm` live under `benches/`.
