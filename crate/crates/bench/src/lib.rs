//! Fixtures shared by the criterion benchmarks.

use coneinf::generate::{dataset_seed, generate_normal};
use coneinf::Instance;

/// Seed of every benchmark fixture.
pub const SEED: u64 = 2024;

/// The `k`-th standard-normal instance of the `(n, m)` cell, as generated by
/// `coneinf bench` with the same seed.
pub fn fixture(n: usize, m: usize, k: usize) -> Instance {
    generate_normal(n, m, dataset_seed(SEED, n, m, k)).expect("valid sizes")
}
