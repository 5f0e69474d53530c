//! Benchmarks live in `benches/`; see `cargo bench -p bellkit-bench`.
