//! Synthetic embeddings with a planted, known bias per word.
//!
//! Two antipodal attribute clusters sit near `+e_1` ("male") and `-e_1`
//! ("female"). Each target word gets a probability `p ~ Normal(mu, sigma)`,
//! clipped to `[0.01, 0.99]`, and is placed so that its component along `e_1`
//! is `2p - 1`; the rest of its unit length points in a random direction
//! orthogonal to `e_1`. Optional Gaussian noise is added before normalizing.

pub mod grid;
pub mod report;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::embedding_io::{EmbeddingSet, WordSetConfig};
use crate::error::{Error, Result};
use crate::stats::{linear_fit, LinearFit};
use crate::vector::Vector;

pub const P_MIN: f64 = 0.01;
pub const P_MAX: f64 = 0.99;

pub const MALE: &str = "male";
pub const FEMALE: &str = "female";
pub const TARGETS: &str = "W";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub dim: usize,
    pub n_words: usize,
    /// Mean of the planted probabilities.
    pub mu: f64,
    /// Spread of the planted probabilities.
    pub sigma: f64,
    /// Amplitude of the isotropic Gaussian noise added to each word; attribute
    /// clusters get half of it.
    pub noise: f64,
    pub n_attrs_per_side: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            dim: 16,
            n_words: 258,
            mu: 0.5,
            sigma: 0.2,
            noise: 0.0,
            n_attrs_per_side: 8,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dim < 3 {
            return bad(format!("dim must be at least 3, got {}", self.dim));
        }
        if self.n_words == 0 || self.n_attrs_per_side == 0 {
            return bad("n_words and n_attrs_per_side must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return bad(format!("mu must lie in [0, 1], got {}", self.mu));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise must be non-negative, got {}", self.noise));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthGroundTruth {
    /// Planted probability per target token, in token order.
    pub per_word_p: IndexMap<String, f64>,
    pub mu: f64,
    pub sigma: f64,
}

impl SynthGroundTruth {
    /// `2p - 1` per token: +1 fully "male", -1 fully "female".
    pub fn signed_bias(&self, token: &str) -> Option<f64> {
        self.per_word_p.get(token).map(|p| 2.0 * p - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub embeddings: EmbeddingSet,
    pub truth: SynthGroundTruth,
    pub word_sets: WordSetConfig,
}

fn gaussian<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Unit vector orthogonal to `e_1`.
fn neutral_direction<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let mut c = gaussian(rng, dim);
        c[0] = 0.0;
        if let Ok(u) = Vector::from_slice(&c).normalized() {
            return u;
        }
    }
}

/// `normalize((2p - 1) e_1 + sqrt(1 - (2p - 1)^2) u + noise)`; `u` must be a
/// unit vector orthogonal to `e_1`. `p` is used as given (no clipping).
pub fn planted_word(p: f64, u: &Vector, noise: &Vector) -> Result<Vector> {
    let b = 2.0 * p - 1.0;
    let base = Vector::basis(u.dim(), 0)
        .scale(b)
        .add_scaled((1.0 - b * b).max(0.0).sqrt(), u);
    (&base + noise).normalized()
}

/// Builds the embedding set, planted truth and word sets for `config`.
///
/// Tokens are `male00`, `female00`, ... for attributes and `w000`, ... for
/// targets. Defining sets pair `male_i` with `female_i`.
pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dim = config.dim;
    let e1 = Vector::basis(dim, 0);
    let attr_width = digits(config.n_attrs_per_side);
    let word_width = digits(config.n_words);

    let mut entries = Vec::with_capacity(config.n_words + 2 * config.n_attrs_per_side);
    let mut sets: IndexMap<String, Vec<String>> = IndexMap::new();
    for (name, pole) in [(MALE, e1.clone()), (FEMALE, -&e1)] {
        let mut tokens = Vec::with_capacity(config.n_attrs_per_side);
        for i in 0..config.n_attrs_per_side {
            let z = Vector::from_slice(&gaussian(&mut rng, dim));
            let v = pole.add_scaled(config.noise / 2.0, &z).normalized()?;
            let token = format!("{name}{i:0attr_width$}");
            entries.push((token.clone(), v));
            tokens.push(token);
        }
        sets.insert(name.to_owned(), tokens);
    }

    let normal = Normal::new(config.mu, config.sigma)
        .map_err(|e| Error::InvalidConfig(format!("planted distribution: {e}")))?;
    let mut per_word_p = IndexMap::with_capacity(config.n_words);
    let mut targets = Vec::with_capacity(config.n_words);
    for j in 0..config.n_words {
        let p = normal.sample(&mut rng).clamp(P_MIN, P_MAX);
        let u = neutral_direction(&mut rng, dim);
        let z = Vector::from_slice(&gaussian(&mut rng, dim)).scale(config.noise);
        let token = format!("w{j:0word_width$}");
        entries.push((token.clone(), planted_word(p, &u, &z)?));
        per_word_p.insert(token.clone(), p);
        targets.push(token);
    }

    let defining_sets = sets[MALE]
        .iter()
        .zip(&sets[FEMALE])
        .enumerate()
        .map(|(i, (m, f))| (format!("pair{i:0attr_width$}"), vec![m.clone(), f.clone()]))
        .collect();
    let mut target_sets = IndexMap::new();
    target_sets.insert(TARGETS.to_owned(), targets);

    Ok(SynthData {
        embeddings: EmbeddingSet::from_entries(format!("synth_{}", config.seed), entries)?,
        truth: SynthGroundTruth {
            per_word_p,
            mu: config.mu,
            sigma: config.sigma,
        },
        word_sets: WordSetConfig {
            attribute_sets: sets,
            target_sets,
            defining_sets,
        },
    })
}

fn digits(n: usize) -> usize {
    n.saturating_sub(1).max(1).to_string().len().max(2)
}

/// Least-squares fit of per-word scores against the planted `2p - 1`.
///
/// Only tokens present in both maps are used; at least 3 are required.
pub fn wordwise_correlation<'a>(
    scores: impl IntoIterator<Item = (&'a str, f64)>,
    truth: &SynthGroundTruth,
) -> Result<LinearFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = scores
        .into_iter()
        .filter_map(|(t, s)| truth.signed_bias(t).map(|b| (b, s)))
        .unzip();
    if x.len() < 3 {
        return Err(Error::DegenerateVariance("fewer than 3 overlapping tokens"));
    }
    linear_fit(&x, &y).map_err(|_| Error::DegenerateVariance("planted bias is constant"))
}
