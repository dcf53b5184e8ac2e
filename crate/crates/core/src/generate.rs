//! Reproducible random instances.
//!
//! Generator: ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`; normal variates come from `rand_distr::StandardNormal`
//! (ziggurat). Coordinates are drawn point by point, height first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{Instance, Point};

/// `m` points in `R^n` with every coordinate i.i.d. standard normal.
pub fn generate_normal(n: usize, m: usize, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if m == 0 {
        return Err(Error::EmptyInstance);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..m)
        .map(|_| {
            let coords: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            Point::from_slice(&coords)
        })
        .collect();
    Instance::new(n, points)
}

/// Seed of dataset `k` for the `(n, m)` cell of a benchmark run.
pub fn dataset_seed(seed: u64, n: usize, m: usize, k: usize) -> u64 {
    // splitmix64 finalizer over the packed cell coordinates
    let mut z = seed
        ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (m as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9)
        ^ (k as u64).wrapping_mul(0x94d0_49bb_1331_11eb);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
