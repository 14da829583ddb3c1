//! Mean Average Cosine similarity (MAC).
//!
//! The per-word distance is `1 - cos` averaged over an attribute set; the
//! score averages that distance over every target word and attribute set.
//! A score of 1 is conventionally read as "fair", but antipodal attribute
//! pairs produce exactly 1 for every target regardless of its bias.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::similarity::cosine;
use crate::vector::Vector;

pub fn mac_word_distance(t: &Vector, attributes: &[Vector]) -> Result<f64> {
    if attributes.is_empty() {
        return Err(Error::EmptyAttributeSet);
    }
    let mut sum = 0.0;
    for a in attributes {
        sum += 1.0 - cosine(t, a)?;
    }
    Ok(sum / attributes.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacResult {
    pub score: f64,
    /// `|score - 1|`; derived convenience value, 0 at the nominal fair score.
    pub deviation_from_ideal: f64,
    /// `per_word_per_set[t][j]` is the distance of target `t` to set `j`.
    pub per_word_per_set: Vec<Vec<f64>>,
    pub sets_used: usize,
    pub words_used: usize,
}

pub fn mac_score(targets: &[Vector], attribute_sets: &[&[Vector]]) -> Result<MacResult> {
    if targets.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    if attribute_sets.is_empty() {
        return Err(Error::EmptyAttributeSet);
    }
    let per_word_per_set = targets
        .iter()
        .map(|t| {
            attribute_sets
                .iter()
                .map(|a| mac_word_distance(t, a))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let count = (targets.len() * attribute_sets.len()) as f64;
    let score = per_word_per_set.iter().flatten().sum::<f64>() / count;
    Ok(MacResult {
        score,
        deviation_from_ideal: (score - 1.0).abs(),
        per_word_per_set,
        sets_used: attribute_sets.len(),
        words_used: targets.len(),
    })
}
