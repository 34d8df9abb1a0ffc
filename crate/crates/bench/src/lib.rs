//! Criterion benchmarks of the solvers; run with `cargo bench -p rabi-bench`.
