//! SAME: scoring association means of word embeddings.
//!
//! The pairwise bias of a word is its cosine with the difference of two
//! attribute means, `cos(w, â_i - â_j)`. Set scores average the absolute
//! pairwise bias; skew and stereotype are the mean and spread of the signed
//! pairwise biases. With more than two attribute sets, the word is scored
//! against each `â_0 - â_i` in turn, removing the component along each
//! direction before moving on to the next.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::{attribute_mean, cosine};
use crate::stats::mean;
use crate::vector::{Vector, EPS_NORM};

/// `â_i - â_j`, rejecting (near) identical means.
pub fn mean_difference(mean_i: &Vector, mean_j: &Vector) -> Result<Vector> {
    let d = mean_i - mean_j;
    if d.norm() <= EPS_NORM {
        return Err(Error::IdenticalAttributeMeans);
    }
    Ok(d)
}

/// Unit bias direction between two attribute sets.
pub fn pairwise_direction(a_i: &[Vector], a_j: &[Vector]) -> Result<Vector> {
    let d = mean_difference(&attribute_mean(a_i)?.vector, &attribute_mean(a_j)?.vector)?;
    d.normalized()
}

pub fn same_pairwise(w: &Vector, a_i: &[Vector], a_j: &[Vector]) -> Result<f64> {
    cosine(w, &pairwise_direction(a_i, a_j)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SameMode {
    Binary,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDirection {
    pub first: usize,
    pub second: usize,
    pub direction: Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SameResult {
    pub set_score: f64,
    /// Signed pairwise bias (binary) or iterative word score (multi), in word order.
    pub per_word: Vec<f64>,
    pub pairwise_directions: Vec<PairDirection>,
    pub mode: SameMode,
}

fn signed_biases(words: &[Vector], direction: &Vector) -> Result<Vec<f64>> {
    if words.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    words.iter().map(|w| cosine(w, direction)).collect()
}

/// Mean absolute pairwise bias of `words` between `a_i` and `a_j`.
pub fn same_set_binary(words: &[Vector], a_i: &[Vector], a_j: &[Vector]) -> Result<SameResult> {
    let direction = pairwise_direction(a_i, a_j)?;
    let per_word = signed_biases(words, &direction)?;
    let set_score = per_word.iter().map(|b| b.abs()).sum::<f64>() / per_word.len() as f64;
    Ok(SameResult {
        set_score,
        per_word,
        pairwise_directions: vec![PairDirection {
            first: 0,
            second: 1,
            direction,
        }],
        mode: SameMode::Binary,
    })
}

/// Multi-attribute word score given attribute means; `means[0]` is the reference.
pub fn same_word_multi_from_means(w: &Vector, means: &[Vector]) -> Result<f64> {
    if means.len() < 2 {
        return Err(Error::InvalidParameters("need at least 2 attribute sets".into()));
    }
    let diffs = means[1..]
        .iter()
        .map(|m| mean_difference(&means[0], m))
        .collect::<Result<Vec<_>>>()?;
    iterative_score(w, &diffs)
}

fn iterative_score(w: &Vector, diffs: &[Vector]) -> Result<f64> {
    let mut residual = w.normalized()?;
    let mut total = 0.0;
    for d in diffs {
        let norm = residual.norm();
        if norm > EPS_NORM {
            total += cosine(&residual, d)?.abs() * norm;
        }
        let u = d.normalized()?;
        residual = residual.add_scaled(-residual.dot(&u), &u);
    }
    Ok(total)
}

fn means_of(sets: &[&[Vector]]) -> Result<Vec<Vector>> {
    if sets.len() < 2 {
        return Err(Error::InvalidParameters("need at least 2 attribute sets".into()));
    }
    sets.iter().map(|s| Ok(attribute_mean(s)?.vector)).collect()
}

/// Multi-attribute word score; `sets[0]` is the reference set.
pub fn same_word_multi(w: &Vector, sets: &[&[Vector]]) -> Result<f64> {
    same_word_multi_from_means(w, &means_of(sets)?)
}

pub fn same_set_multi(words: &[Vector], sets: &[&[Vector]]) -> Result<SameResult> {
    if words.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    let means = means_of(sets)?;
    let diffs = means[1..]
        .iter()
        .map(|m| mean_difference(&means[0], m))
        .collect::<Result<Vec<_>>>()?;
    let per_word = words
        .iter()
        .map(|w| iterative_score(w, &diffs))
        .collect::<Result<Vec<_>>>()?;
    let pairwise_directions = diffs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            Ok(PairDirection {
                first: 0,
                second: i + 1,
                direction: d.normalized()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SameResult {
        set_score: mean(&per_word),
        per_word,
        pairwise_directions,
        mode: SameMode::Multi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceSweep {
    /// `scores[r]` uses set `r` as the reference.
    pub scores: Vec<f64>,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// Multi-attribute set score for every choice of reference set.
pub fn same_set_multi_reference_sweep(words: &[Vector], sets: &[&[Vector]]) -> Result<ReferenceSweep> {
    let scores = (0..sets.len())
        .map(|r| {
            let mut reordered: Vec<&[Vector]> = Vec::with_capacity(sets.len());
            reordered.push(sets[r]);
            reordered.extend(sets.iter().enumerate().filter(|(i, _)| *i != r).map(|(_, s)| *s));
            Ok(same_set_multi(words, &reordered)?.set_score)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ReferenceSweep {
        min: scores.iter().copied().fold(f64::INFINITY, f64::min),
        max: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: mean(&scores),
        scores,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StereotypeVariant {
    /// `(1/|W|) * sqrt(sum (b - skew)^2)`.
    #[default]
    AsWritten,
    /// `sqrt((1/|W|) * sum (b - skew)^2)`, the usual population standard deviation.
    PopulationStd,
}

pub fn stereotype_from_biases(biases: &[f64], variant: StereotypeVariant) -> f64 {
    let skew = mean(biases);
    let ss: f64 = biases.iter().map(|b| (b - skew).powi(2)).sum();
    let n = biases.len() as f64;
    match variant {
        StereotypeVariant::AsWritten => ss.sqrt() / n,
        StereotypeVariant::PopulationStd => (ss / n).sqrt(),
    }
}

/// Mean signed pairwise bias.
pub fn same_skew(words: &[Vector], a_i: &[Vector], a_j: &[Vector]) -> Result<f64> {
    Ok(mean(&signed_biases(words, &pairwise_direction(a_i, a_j)?)?))
}

pub fn same_stereotype(
    words: &[Vector],
    a_i: &[Vector],
    a_j: &[Vector],
    variant: StereotypeVariant,
) -> Result<f64> {
    let b = signed_biases(words, &pairwise_direction(a_i, a_j)?)?;
    Ok(stereotype_from_biases(&b, variant))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contrast {
    AllPairs,
    OneVsRest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContrastPair {
    Pair { first: usize, second: usize },
    /// Set `index` against the union of all other sets.
    OneVsRest { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewStereoResult {
    pub skew: f64,
    pub stereotype: f64,
    pub pair: ContrastPair,
    pub variant: StereotypeVariant,
}

/// Skew and stereotype for every contrast between `sets`.
///
/// `AllPairs` yields `n(n-1)/2` unordered pairs `(i, j)` with `i < j`;
/// `OneVsRest` yields one row per set, contrasted with the union of the rest.
pub fn same_skew_stereo_multi(
    words: &[Vector],
    sets: &[&[Vector]],
    contrast: Contrast,
    variant: StereotypeVariant,
) -> Result<Vec<SkewStereoResult>> {
    if sets.len() < 2 {
        return Err(Error::InvalidParameters("need at least 2 attribute sets".into()));
    }
    let row = |pair: ContrastPair, a: &[Vector], b: &[Vector]| -> Result<SkewStereoResult> {
        let biases = signed_biases(words, &pairwise_direction(a, b)?)?;
        Ok(SkewStereoResult {
            skew: mean(&biases),
            stereotype: stereotype_from_biases(&biases, variant),
            pair,
            variant,
        })
    };
    let n = sets.len();
    match contrast {
        Contrast::AllPairs => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| row(ContrastPair::Pair { first: i, second: j }, sets[i], sets[j]))
            .collect(),
        Contrast::OneVsRest => (0..n)
            .map(|i| {
                let rest: Vec<Vector> = sets
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .flat_map(|(_, s)| s.iter().cloned())
                    .collect();
                row(ContrastPair::OneVsRest { index: i }, sets[i], &rest)
            })
            .collect(),
    }
}
