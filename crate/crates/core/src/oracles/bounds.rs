//! Randomized checks of the proven metric ranges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracles::random_vector;
use crate::stats::{mean, population_std};
use crate::weat::{effect_size_from_associations, EFFECT_SIZE_STD_EPS};
use crate::weat::associations;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardizedSumBound {
    /// `|sum_j (x_{i_j} - mean) / std|` with the population std.
    pub lhs: f64,
    /// `sqrt(m (n - m))`.
    pub bound: f64,
    pub holds: bool,
    pub at_equality: bool,
}

/// Compares the absolute standardized sum over `indices` with `sqrt(m (n - m))`.
pub fn check_standardized_sum_bound(xs: &[f64], indices: &[usize]) -> Result<StandardizedSumBound> {
    let (n, m) = (xs.len(), indices.len());
    if n < 2 || m == 0 || m >= n {
        return Err(Error::InvalidParameters(format!("need n >= 2 and 0 < m < n, got n={n}, m={m}")));
    }
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidParameters(format!("index {i} out of range or repeated")));
        }
    }
    let sd = population_std(xs);
    if sd <= EFFECT_SIZE_STD_EPS {
        return Err(Error::DegenerateStdDev);
    }
    let mu = mean(xs);
    let lhs = indices.iter().map(|&i| (xs[i] - mu) / sd).sum::<f64>().abs();
    let bound = ((m * (n - m)) as f64).sqrt();
    Ok(StandardizedSumBound {
        lhs,
        bound,
        holds: lhs <= bound + 1e-9,
        at_equality: (lhs - bound).abs() <= 1e-9,
    })
}

/// Summary of a batch of random draws against an upper bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomBoundReport {
    pub draws: usize,
    /// Draws where the quantity was undefined and therefore skipped.
    pub skipped: usize,
    pub violations: usize,
    /// Largest observed value of `quantity - bound`.
    pub worst_excess: f64,
}

fn reduce(results: Vec<Option<f64>>) -> RandomBoundReport {
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let excesses: Vec<f64> = results.into_iter().flatten().collect();
    RandomBoundReport {
        draws: excesses.len() + skipped,
        skipped,
        violations: excesses.iter().filter(|&&e| e > 1e-9).count(),
        worst_excess: excesses.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn draw_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Random standardized-sum instances with `2 <= n <= 12`; values are Gaussian, or with
/// probability 1/4 drawn from `{-1, 1}` to exercise the equality case.
pub fn random_standardized_sum_draws(draws: usize, seed: u64) -> RandomBoundReport {
    let results = (0..draws)
        .into_par_iter()
        .map(|k| {
            let mut rng = draw_rng(seed, k);
            let n = rng.random_range(2..=12usize);
            let m = rng.random_range(1..n);
            let two_point = rng.random_bool(0.25);
            let xs: Vec<f64> = (0..n)
                .map(|_| {
                    if two_point {
                        if rng.random_bool(0.5) { 1.0 } else { -1.0 }
                    } else {
                        rng.sample::<f64, _>(rand_distr::StandardNormal)
                    }
                })
                .collect();
            let indices = rand::seq::index::sample(&mut rng, n, m).into_vec();
            check_standardized_sum_bound(&xs, &indices).ok().map(|r| r.lhs - r.bound)
        })
        .collect();
    reduce(results)
}

/// Random WEAT instances (dim 2..=16, `|X| = |Y|` in 2..=8, attribute sets of
/// 1..=4 random vectors); reports the excess of `|d|` over 2.
pub fn random_weat_effect_sizes(draws: usize, seed: u64) -> RandomBoundReport {
    let results = (0..draws)
        .into_par_iter()
        .map(|k| {
            let mut rng = draw_rng(seed, k);
            let dim = rng.random_range(2..=16usize);
            let m = rng.random_range(2..=8usize);
            let set = |rng: &mut ChaCha8Rng, len: usize| -> Vec<_> { (0..len).map(|_| random_vector(rng, dim)).collect() };
            let x = set(&mut rng, m);
            let y = set(&mut rng, m);
            let na = rng.random_range(1..=4usize);
            let a = set(&mut rng, na);
            let nb = rng.random_range(1..=4usize);
            let b = set(&mut rng, nb);
            let sx = associations(&x, &a, &b).ok()?;
            let sy = associations(&y, &a, &b).ok()?;
            effect_size_from_associations(&sx, &sy).ok().map(|d| d.abs() - 2.0)
        })
        .collect();
    reduce(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardized_sum_examples() {
        let r = check_standardized_sum_bound(&[-1.0, -1.0, 1.0, 1.0], &[0, 1]).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.bound - 2.0).abs() < 1e-15);
        assert!(r.holds && r.at_equality);
        let r = check_standardized_sum_bound(&[1.0, 2.0, 3.0, 4.0], &[0]).unwrap();
        assert!((r.bound - 1.7320508075688772).abs() < 1e-15);
        assert!((r.lhs - 1.3416407864998738).abs() < 1e-12);
        assert!(r.holds && !r.at_equality);
        assert!(matches!(
            check_standardized_sum_bound(&[2.0, 2.0, 2.0], &[0]),
            Err(Error::DegenerateStdDev)
        ));
        assert!(check_standardized_sum_bound(&[1.0, 2.0], &[0, 0]).is_err());
        assert!(check_standardized_sum_bound(&[1.0, 2.0], &[0, 1]).is_err());
    }

    #[test]
    fn random_draws_are_deterministic_and_hold() {
        let a = random_standardized_sum_draws(2000, 3);
        assert_eq!(a, random_standardized_sum_draws(2000, 3));
        assert_eq!(a.violations, 0);
        let w = random_weat_effect_sizes(2000, 3);
        assert_eq!(w.violations, 0);
        assert!(w.worst_excess <= 1e-9);
    }
}
