//! Random-restart coordinate search used to probe metric suprema.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::same::{mean_difference, same_word_multi_from_means};
use crate::similarity::cosine;
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    pub initial_step: f64,
    /// Consecutive failed moves before the step is halved.
    pub patience: usize,
    pub min_step: f64,
    /// Hard cap on objective evaluations per restart.
    pub max_evaluations: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            initial_step: 0.5,
            patience: 50,
            min_step: 1e-6,
            max_evaluations: 200_000,
        }
    }
}

/// Maximizes `f` from `start` by moving one random coordinate at a time by
/// `±step`; the step halves after `patience` failures in a row.
pub fn coordinate_ascent<F, R>(f: F, start: Vec<f64>, rng: &mut R, settings: SearchSettings) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
    R: Rng,
{
    let mut x = start;
    let mut best = f(&x);
    let mut step = settings.initial_step;
    let mut failures = 0;
    let mut evaluations = 1;
    while step >= settings.min_step && evaluations < settings.max_evaluations {
        let c = rng.random_range(0..x.len());
        let original = x[c];
        let mut improved = false;
        for delta in [step, -step] {
            x[c] = original + delta;
            let value = f(&x);
            evaluations += 1;
            if value > best {
                best = value;
                improved = true;
                break;
            }
        }
        if improved {
            failures = 0;
        } else {
            x[c] = original;
            failures += 1;
            if failures >= settings.patience {
                step /= 2.0;
                failures = 0;
            }
        }
    }
    (best, x)
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Runs `restarts` independent searches from Gaussian starts (restart `k` uses
/// stream `k` of the seeded generator) and keeps the best; exact ties go to
/// the lexicographically smallest point, so the result does not depend on
/// thread scheduling.
pub fn multistart<F>(f: F, len: usize, restarts: usize, seed: u64, settings: SearchSettings) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..restarts.max(1))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let start = (0..len).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
            coordinate_ascent(&f, start, &mut rng, settings)
        })
        .reduce_with(|a, b| match a.0.total_cmp(&b.0) {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal => {
                if lexicographic(&a.1, &b.1).is_le() {
                    a
                } else {
                    b
                }
            }
        })
        .expect("at least one restart")
}

/// Best multi-attribute SAME configuration found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SameMultiMax {
    pub max_found: f64,
    /// Unit word.
    pub word: Vec<f64>,
    /// Attribute means, reference first, each inside the unit ball.
    pub means: Vec<Vec<f64>>,
    pub restarts: usize,
}

/// Clips to the closed unit ball, where every attribute mean of unit vectors lives.
fn into_unit_ball(c: &[f64]) -> Vec<f64> {
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 {
        c.iter().map(|x| x / norm).collect()
    } else {
        c.to_vec()
    }
}

fn decode(theta: &[f64], dim: usize) -> Option<(Vector, Vec<Vector>)> {
    let word = Vector::new(theta[..dim].to_vec()).ok()?.normalized().ok()?;
    let means = theta[dim..]
        .chunks(dim)
        .map(|c| Vector::new(into_unit_ball(c)).ok())
        .collect::<Option<Vec<_>>>()?;
    Some((word, means))
}

/// Searches unit words and attribute means for the largest multi-attribute
/// SAME word score. `iterations` is the number of random restarts.
pub fn search_same_multi_max(dim: usize, n_sets: usize, iterations: usize, seed: u64) -> Result<SameMultiMax> {
    if dim < 2 || n_sets < 2 {
        return Err(Error::InvalidParameters(format!(
            "need dim >= 2 and at least 2 sets, got dim={dim}, n_sets={n_sets}"
        )));
    }
    let objective = |theta: &[f64]| match decode(theta, dim) {
        Some((w, means)) => same_word_multi_from_means(&w, &means).unwrap_or(f64::NEG_INFINITY),
        None => f64::NEG_INFINITY,
    };
    let (_, theta) = multistart(objective, dim * (1 + n_sets), iterations, seed, SearchSettings::default());
    let (word, means) = decode(&theta, dim).ok_or(Error::ZeroVector)?;
    Ok(SameMultiMax {
        max_found: same_word_multi_from_means(&word, &means)?,
        word: word.into_inner(),
        means: means.into_iter().map(Vector::into_inner).collect(),
        restarts: iterations.max(1),
    })
}

/// Largest `|cos(w, â_i - â_j)|` found over words `w`, and the maximizing unit word.
pub fn search_same_binary_max(
    mean_i: &Vector,
    mean_j: &Vector,
    restarts: usize,
    seed: u64,
) -> Result<(f64, Vector)> {
    let d = mean_difference(mean_i, mean_j)?;
    let objective = |w: &[f64]| match Vector::new(w.to_vec()) {
        Ok(w) => cosine(&w, &d).map(f64::abs).unwrap_or(f64::NEG_INFINITY),
        Err(_) => f64::NEG_INFINITY,
    };
    let (best, w) = multistart(objective, d.dim(), restarts, seed, SearchSettings::default());
    Ok((best, Vector::new(w)?.normalized()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascent_finds_quadratic_peak() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (best, x) = coordinate_ascent(
            |x| -(x[0] - 1.0).powi(2) - (x[1] + 2.0).powi(2),
            vec![0.0, 0.0],
            &mut rng,
            SearchSettings::default(),
        );
        assert!(best > -1e-10);
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn multi_search_exceeds_one_in_the_plane() {
        let r = search_same_multi_max(2, 3, 64, 11).unwrap();
        assert!(r.max_found >= 1.2071067, "{r:?}");
        assert_eq!(r, search_same_multi_max(2, 3, 64, 11).unwrap());
    }

    #[test]
    fn two_sets_stay_within_one() {
        let r = search_same_multi_max(3, 2, 16, 5).unwrap();
        assert!(r.max_found <= 1.0 + 1e-9);
        assert!(r.max_found > 1.0 - 1e-6);
        assert!(search_same_multi_max(1, 3, 4, 0).is_err());
    }
}
