//! Fixtures shared by the benchmarks.

use cosbias_core::oracles::random_vector;
use cosbias_core::Vector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `n` Gaussian vectors of dimension `dim`, reproducible from `seed`.
pub fn random_set(n: usize, dim: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_vector(&mut rng, dim)).collect()
}

/// Defining sets of two members each.
pub fn random_pairs(n: usize, dim: usize, seed: u64) -> Vec<Vec<Vector>> {
    random_set(2 * n, dim, seed).chunks(2).map(<[Vector]>::to_vec).collect()
}
