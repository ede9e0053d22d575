//! Shared fixtures for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tessnet_core::Point3;

/// `n` points uniform in the cube `[-half_side, half_side]³`.
pub fn random_points(n: usize, half_side: f64, seed: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Point3::new(
                rng.random_range(-half_side..half_side),
                rng.random_range(-half_side..half_side),
                rng.random_range(-half_side..half_side),
            )
        })
        .collect()
}
