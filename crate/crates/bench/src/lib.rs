//! Criterion benchmarks for the estimator hot loop and small ensembles; see `benches/`.
