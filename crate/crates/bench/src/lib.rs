//! Criterion benchmarks for the enumeration, Gröbner and representation kernels live in `benches/`.
