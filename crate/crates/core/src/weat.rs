//! Word Embedding Association Test: word association, effect size, test
//! statistic and the partition permutation test.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::embedding_io::ResolvedSet;
use crate::error::{Error, Result};
use crate::similarity::set_similarity;
use crate::stats::{mean, population_std};
use crate::vector::Vector;

/// Standard deviations at or below this make the effect size undefined.
pub const EFFECT_SIZE_STD_EPS: f64 = 1e-15;

/// `s(w, A, B)`: mean cosine to `a` minus mean cosine to `b`.
///
/// Each set is averaged over its own size, so `|A| != |B|` is accepted.
pub fn weat_word_association(w: &Vector, a: &[Vector], b: &[Vector]) -> Result<f64> {
    Ok(set_similarity(w, a)? - set_similarity(w, b)?)
}

pub fn associations(words: &[Vector], a: &[Vector], b: &[Vector]) -> Result<Vec<f64>> {
    words.iter().map(|w| weat_word_association(w, a, b)).collect()
}

/// Effect size from precomputed associations, population standard deviation.
pub fn effect_size_from_associations(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    let all: Vec<f64> = x.iter().chain(y).copied().collect();
    let std = population_std(&all);
    if std <= EFFECT_SIZE_STD_EPS {
        return Err(Error::UndefinedEffectSize);
    }
    Ok((mean(x) - mean(y)) / std)
}

pub fn weat_effect_size(x: &[Vector], y: &[Vector], a: &[Vector], b: &[Vector]) -> Result<f64> {
    effect_size_from_associations(&associations(x, a, b)?, &associations(y, a, b)?)
}

pub fn weat_test_statistic(x: &[Vector], y: &[Vector], a: &[Vector], b: &[Vector]) -> Result<f64> {
    let sx: f64 = associations(x, a, b)?.iter().sum();
    let sy: f64 = associations(y, a, b)?.iter().sum();
    Ok(sx - sy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PermutationTest {
    pub p_value: f64,
    pub exhaustive: bool,
    pub permutations_used: u64,
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Statistic of the partition where `x_idx` (sorted, size m) forms X_i.
fn partition_statistic(assoc: &[f64], x_idx: &[usize], total: f64) -> f64 {
    let sx: f64 = x_idx.iter().map(|&i| assoc[i]).sum();
    2.0 * sx - total
}

/// True when `candidate` strictly exceeds `observed`; differences within
/// 1e-12 relative are rounding ties and do not count.
fn exceeds(candidate: f64, observed: f64) -> bool {
    candidate - observed > 1e-12 * (1.0 + observed.abs())
}

/// Permutation test over equal-size partitions of `x ∪ y`.
///
/// Enumerates all `C(2m, m)` partitions when that count is at most
/// `max_permutations`; otherwise draws `max_permutations` random non-identity
/// partitions. Draw `k` uses its own ChaCha8 stream derived from `seed`, so the
/// result does not depend on thread scheduling.
pub fn weat_p_value(
    x: &[Vector],
    y: &[Vector],
    a: &[Vector],
    b: &[Vector],
    max_permutations: u64,
    seed: u64,
) -> Result<PermutationTest> {
    if x.len() != y.len() {
        return Err(Error::UnequalTargetSets { x: x.len(), y: y.len() });
    }
    if x.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    if max_permutations == 0 {
        return Err(Error::InvalidParameters("max_permutations must be positive".into()));
    }
    let mut assoc = associations(x, a, b)?;
    assoc.extend(associations(y, a, b)?);
    Ok(permutation_test_from_associations(&assoc, x.len(), max_permutations, seed))
}

/// Same as [`weat_p_value`] on precomputed associations: the first `m`
/// entries are X, the remaining `m` are Y.
pub fn permutation_test_from_associations(
    assoc: &[f64],
    m: usize,
    max_permutations: u64,
    seed: u64,
) -> PermutationTest {
    let n = assoc.len();
    debug_assert_eq!(n, 2 * m);
    let total: f64 = assoc.iter().sum();
    let identity: Vec<usize> = (0..m).collect();
    let observed = partition_statistic(assoc, &identity, total);
    let partitions = binomial(n as u64, m as u64);

    if partitions <= max_permutations {
        let exceeding = (0..n)
            .combinations(m)
            .filter(|idx| exceeds(partition_statistic(assoc, idx, total), observed))
            .count() as u64;
        return PermutationTest {
            p_value: exceeding as f64 / partitions as f64,
            exhaustive: true,
            permutations_used: partitions,
        };
    }

    let exceeding: u64 = (0..max_permutations)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            loop {
                let mut idx = sample(&mut rng, n, m).into_vec();
                idx.sort_unstable();
                if idx != identity {
                    return exceeds(partition_statistic(assoc, &idx, total), observed) as u64;
                }
            }
        })
        .sum();
    PermutationTest {
        p_value: exceeding as f64 / max_permutations as f64,
        exhaustive: false,
        permutations_used: max_permutations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeatResult {
    /// `None` when the association standard deviation is zero.
    pub effect_size: Option<f64>,
    pub test_statistic: f64,
    /// Absent when the permutation test was skipped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub permutations_used: u64,
    pub exhaustive: bool,
    pub word_associations: BTreeMap<String, f64>,
}

/// Runs the full test on resolved sets. `permutations == 0` skips the p-value.
pub fn weat(
    x: &ResolvedSet,
    y: &ResolvedSet,
    a: &ResolvedSet,
    b: &ResolvedSet,
    permutations: u64,
    seed: u64,
) -> Result<WeatResult> {
    let ax = associations(&x.vectors, &a.vectors, &b.vectors)?;
    let ay = associations(&y.vectors, &a.vectors, &b.vectors)?;
    let effect_size = match effect_size_from_associations(&ax, &ay) {
        Ok(d) => Some(d),
        Err(Error::UndefinedEffectSize) => None,
        Err(e) => return Err(e),
    };
    let test_statistic = ax.iter().sum::<f64>() - ay.iter().sum::<f64>();
    let (p_value, permutations_used, exhaustive) = if permutations > 0 {
        if ax.len() != ay.len() {
            return Err(Error::UnequalTargetSets { x: ax.len(), y: ay.len() });
        }
        let all: Vec<f64> = ax.iter().chain(&ay).copied().collect();
        let t = permutation_test_from_associations(&all, ax.len(), permutations, seed);
        (Some(t.p_value), t.permutations_used, t.exhaustive)
    } else {
        (None, 0, false)
    };
    let word_associations = x
        .tokens
        .iter()
        .zip(&ax)
        .chain(y.tokens.iter().zip(&ay))
        .map(|(t, v)| (t.clone(), *v))
        .collect();
    Ok(WeatResult {
        effect_size,
        test_statistic,
        p_value,
        permutations_used,
        exhaustive,
        word_associations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn v(c: &[f64]) -> Vector {
        Vector::from_slice(c)
    }

    fn ab() -> (Vec<Vector>, Vec<Vector>) {
        (vec![v(&[1.0, 0.0])], vec![v(&[0.0, 1.0])])
    }

    fn extremal() -> (Vec<Vector>, Vec<Vector>) {
        let x = v(&[1.0 / SQRT_2, -1.0 / SQRT_2]);
        let y = -&x;
        (vec![x.clone(), x], vec![y.clone(), y])
    }

    #[test]
    fn association_examples() {
        let (a, b) = ab();
        assert_eq!(weat_word_association(&v(&[1.0, 0.0]), &a, &b).unwrap(), 1.0);
        assert_eq!(weat_word_association(&v(&[1.0, 1.0]), &a, &b).unwrap(), 0.0);
        let s = weat_word_association(&v(&[1.0 / SQRT_2, -1.0 / SQRT_2]), &a, &b).unwrap();
        assert!((s - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(matches!(
            weat_word_association(&v(&[1.0, 0.0]), &[], &b),
            Err(Error::EmptyAttributeSet)
        ));
    }

    #[test]
    fn effect_size_examples() {
        let (a, b) = ab();
        let (x, y) = extremal();
        assert!((weat_effect_size(&x, &y, &a, &b).unwrap() - 2.0).abs() < 1e-12);

        let orth = vec![v(&[0.0, 0.0, 1.0]); 2];
        let a3 = vec![v(&[1.0, 0.0, 0.0])];
        let b3 = vec![v(&[0.0, 1.0, 0.0])];
        assert!(matches!(
            weat_effect_size(&orth, &orth, &a3, &b3),
            Err(Error::UndefinedEffectSize)
        ));

        // associations (1, 0 | 1, 0): blind spot
        let x = vec![v(&[1.0, 0.0]), v(&[1.0, 1.0]).normalized().unwrap()];
        let y = vec![v(&[0.0, -1.0]), v(&[-1.0, -1.0]).normalized().unwrap()];
        let assoc: Vec<f64> = associations(&x, &a, &b).unwrap();
        assert!((assoc[0] - 1.0).abs() < 1e-15 && assoc[1].abs() < 1e-15);
        assert!(weat_effect_size(&x, &y, &a, &b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn test_statistic_examples() {
        let (a, b) = ab();
        let (x, y) = extremal();
        let s = weat_test_statistic(&x, &y, &a, &b).unwrap();
        assert!((s - 4.0 * SQRT_2).abs() < 1e-12);
        assert_eq!(weat_test_statistic(&x, &x, &a, &b).unwrap(), 0.0);
    }

    #[test]
    fn p_value_extremal_exhaustive() {
        let (a, b) = ab();
        let (x, y) = extremal();
        let t = weat_p_value(&x, &y, &a, &b, 1000, 1).unwrap();
        assert_eq!(t, PermutationTest { p_value: 0.0, exhaustive: true, permutations_used: 6 });
    }

    #[test]
    fn p_value_all_ties_is_zero() {
        let (a, b) = ab();
        let same = vec![v(&[1.0, 1.0]); 3];
        let t = weat_p_value(&same, &same, &a, &b, 1000, 1).unwrap();
        assert_eq!(t.p_value, 0.0);
        assert_eq!(t.permutations_used, 20);
    }

    #[test]
    fn p_value_requires_equal_sizes() {
        let (a, b) = ab();
        let (x, _) = extremal();
        assert!(matches!(
            weat_p_value(&x, &x[..1], &a, &b, 10, 0),
            Err(Error::UnequalTargetSets { x: 2, y: 1 })
        ));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(200, 100), u64::MAX);
    }

    /// Brute-force reference for the exhaustive branch: enumerate every
    /// labelling bitmask with exactly m ones.
    fn brute_force_p(assoc: &[f64], m: usize) -> f64 {
        let n = assoc.len();
        let observed: f64 = assoc[..m].iter().sum::<f64>() - assoc[m..].iter().sum::<f64>();
        let (mut hits, mut total) = (0u32, 0u32);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != m {
                continue;
            }
            total += 1;
            let s: f64 = (0..n)
                .map(|i| if mask & (1 << i) != 0 { assoc[i] } else { -assoc[i] })
                .sum();
            if s - observed > 1e-12 * (1.0 + observed.abs()) {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    #[test]
    fn exhaustive_matches_bitmask_enumeration() {
        let assoc = [0.3, -0.1, 0.25, 0.05, -0.4, 0.2, 0.0, 0.1];
        let t = permutation_test_from_associations(&assoc, 4, 1_000, 0);
        assert!(t.exhaustive);
        assert_eq!(t.p_value, brute_force_p(&assoc, 4));
    }

    #[test]
    fn monte_carlo_deterministic_and_close() {
        let assoc = [0.3, -0.1, 0.25, 0.05, -0.4, 0.2, 0.0, 0.1, 0.15, -0.2];
        let a = permutation_test_from_associations(&assoc, 5, 200, 42);
        let b = permutation_test_from_associations(&assoc, 5, 200, 42);
        assert!(!a.exhaustive);
        assert_eq!(a, b);
        let exact = brute_force_p(&assoc, 5);
        let mc = permutation_test_from_associations(&assoc, 5, 20_000, 7);
        assert!((mc.p_value - exact).abs() < 0.02, "{} vs {}", mc.p_value, exact);
    }

    #[test]
    fn runner_skips_p_value_when_zero_permutations() {
        let (a, b) = ab();
        let (x, y) = extremal();
        let rs = |tokens: &[&str], vectors: Vec<Vector>| ResolvedSet {
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            vectors,
        };
        let r = weat(
            &rs(&["x0", "x1"], x),
            &rs(&["y0", "y1"], y),
            &rs(&["a"], a),
            &rs(&["b"], b),
            0,
            0,
        )
        .unwrap();
        assert!(r.p_value.is_none());
        assert!((r.effect_size.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(r.word_associations.len(), 4);
    }
}
