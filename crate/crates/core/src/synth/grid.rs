//! Metric evaluation on synthetic models: full-set scores, word-wise fits
//! against the planted truth, subset robustness, and (mu, sigma) grids.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::direct_bias::{bias_direction_pca, direct_bias_per_word};
use crate::embedding_io::{resolve, ResolveMode};
use crate::error::{Error, Result};
use crate::mac::mac_score;
use crate::same::{same_set_binary, stereotype_from_biases, StereotypeVariant};
use crate::stats::{mean, sample_std};
use crate::synth::{generate, wordwise_correlation, SynthConfig, SynthData, FEMALE, MALE, TARGETS};
use crate::vector::Vector;
use crate::weat::{associations, effect_size_from_associations};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Weat,
    Mac,
    DirectBias,
    Same,
    Skew,
    Stereotype,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Weat,
        Metric::Mac,
        Metric::DirectBias,
        Metric::Same,
        Metric::Skew,
        Metric::Stereotype,
    ];

    /// Width of the metric's attainable score interval.
    pub fn interval_width(self) -> f64 {
        match self {
            Metric::Weat => 4.0,
            Metric::Mac | Metric::Skew => 2.0,
            Metric::DirectBias | Metric::Same | Metric::Stereotype => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Weat => "weat",
            Metric::Mac => "mac",
            Metric::DirectBias => "direct_bias",
            Metric::Same => "same",
            Metric::Skew => "skew",
            Metric::Stereotype => "stereotype",
        }
    }
}

/// Set-level scores of one model; `None` where the metric is undefined.
pub type Scores = [Option<f64>; 6];

/// Per-word scores of one model, aligned with `tokens`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordScores {
    pub tokens: Vec<String>,
    /// Planted `2p - 1`.
    pub truth: Vec<f64>,
    pub weat_association: Vec<f64>,
    pub mac: Vec<f64>,
    pub direct_bias: Vec<f64>,
    pub same: Vec<f64>,
}

/// Word-wise R^2 against the planted truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WordwiseFit {
    pub weat: f64,
    pub mac: f64,
    pub direct_bias: f64,
    pub same: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelEvaluation {
    pub scores: Scores,
    pub r_squared: WordwiseFit,
    pub words: WordScores,
}

/// A model prepared for repeated scoring of word subsets.
pub struct PreparedModel {
    tokens: Vec<String>,
    p: Vec<f64>,
    words: Vec<Vector>,
    male: Vec<Vector>,
    female: Vec<Vector>,
    direction: Vector,
}

impl PreparedModel {
    pub fn new(data: &SynthData) -> Result<Self> {
        let sets = resolve(&data.word_sets, &data.embeddings, ResolveMode::Strict)?;
        let w = sets.target(TARGETS)?;
        let p = w
            .tokens
            .iter()
            .map(|t| data.truth.per_word_p.get(t).copied().ok_or_else(|| Error::UnknownSet(t.clone())))
            .collect::<Result<Vec<_>>>()?;
        let direction = bias_direction_pca(&sets.defining_vectors(), 1)?.basis.remove(0);
        Ok(PreparedModel {
            tokens: w.tokens.clone(),
            p,
            words: w.vectors.clone(),
            male: sets.attribute(MALE)?.vectors.clone(),
            female: sets.attribute(FEMALE)?.vectors.clone(),
            direction,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Splits `indices` by planted bias: the upper half is X, the lower half
    /// Y; the middle word is dropped when the count is odd.
    pub fn weat_split(&self, indices: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut order = indices.to_vec();
        order.sort_by(|&a, &b| self.p[b].total_cmp(&self.p[a]).then(a.cmp(&b)));
        let half = order.len() / 2;
        let y = order.split_off(order.len() - half);
        order.truncate(half);
        (order, y)
    }

    /// Set-level scores on the words at `indices`.
    pub fn scores(&self, indices: &[usize]) -> Result<Scores> {
        let pick = |idx: &[usize]| idx.iter().map(|&i| self.words[i].clone()).collect::<Vec<_>>();
        let words = pick(indices);
        let (x, y) = self.weat_split(indices);
        let weat = match effect_size_from_associations(
            &associations(&pick(&x), &self.male, &self.female)?,
            &associations(&pick(&y), &self.male, &self.female)?,
        ) {
            Ok(d) => Some(d),
            Err(Error::UndefinedEffectSize) | Err(Error::EmptyTargetSet) => None,
            Err(e) => return Err(e),
        };
        let mac = mac_score(&words, &[&self.male, &self.female])?.score;
        let db = mean(&direct_bias_per_word(&words, &self.direction, 1.0)?);
        let same = same_set_binary(&words, &self.male, &self.female)?;
        Ok([
            weat,
            Some(mac),
            Some(db),
            Some(same.set_score),
            Some(mean(&same.per_word)),
            Some(stereotype_from_biases(&same.per_word, StereotypeVariant::AsWritten)),
        ])
    }

    pub fn evaluate(&self) -> Result<ModelEvaluation> {
        let all: Vec<usize> = (0..self.len()).collect();
        let scores = self.scores(&all)?;
        let truth: Vec<f64> = self.p.iter().map(|p| 2.0 * p - 1.0).collect();
        let mac = mac_score(&self.words, &[&self.male, &self.female])?
            .per_word_per_set
            .iter()
            .map(|row| mean(row))
            .collect();
        let words = WordScores {
            tokens: self.tokens.clone(),
            weat_association: associations(&self.words, &self.male, &self.female)?,
            mac,
            direct_bias: direct_bias_per_word(&self.words, &self.direction, 1.0)?,
            same: same_set_binary(&self.words, &self.male, &self.female)?.per_word,
            truth,
        };
        let r2 = |s: &[f64]| -> Result<f64> {
            let truth = crate::synth::SynthGroundTruth {
                per_word_p: self.tokens.iter().cloned().zip(self.p.iter().copied()).collect(),
                mu: f64::NAN,
                sigma: f64::NAN,
            };
            Ok(wordwise_correlation(self.tokens.iter().map(String::as_str).zip(s.iter().copied()), &truth)?.r_squared)
        };
        Ok(ModelEvaluation {
            scores,
            r_squared: WordwiseFit {
                weat: r2(&words.weat_association)?,
                mac: r2(&words.mac)?,
                direct_bias: r2(&words.direct_bias)?,
                same: r2(&words.same)?,
            },
            words,
        })
    }

    /// Mean over `iterations` half-size subsets of `|b(W_i) - b(W)|`, divided
    /// by each metric's interval width. Iterations where WEAT is undefined on
    /// the subset or the full set are left out of the WEAT mean.
    pub fn subset_robustness(&self, iterations: usize, seed: u64) -> Result<Robustness> {
        let n = self.len();
        if n < 4 {
            return Err(Error::SubsetTooSmall(n));
        }
        let full = self.scores(&(0..n).collect::<Vec<_>>())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subsets: Vec<Vec<usize>> = (0..iterations).map(|_| sample(&mut rng, n, n / 2).into_vec()).collect();
        let diffs = subsets
            .par_iter()
            .map(|s| {
                let scores = self.scores(s)?;
                Ok(std::array::from_fn::<Option<f64>, 6, _>(|k| {
                    Some((scores[k]? - full[k]?).abs() / Metric::ALL[k].interval_width())
                }))
            })
            .collect::<Result<Vec<[Option<f64>; 6]>>>()?;
        let normalized = std::array::from_fn(|k| {
            let vals: Vec<f64> = diffs.iter().filter_map(|d| d[k]).collect();
            if vals.is_empty() { None } else { Some(mean(&vals)) }
        });
        Ok(Robustness {
            iterations,
            normalized_mean_abs_diff: normalized,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Robustness {
    pub iterations: usize,
    /// Indexed like [`Metric::ALL`].
    pub normalized_mean_abs_diff: [Option<f64>; 6],
}

impl Robustness {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        self.normalized_mean_abs_diff[metric as usize]
    }
}

/// Subset robustness of the target words of `data`.
pub fn subset_robustness(data: &SynthData, iterations: usize, seed: u64) -> Result<Robustness> {
    PreparedModel::new(data)?.subset_robustness(iterations, seed)
}

/// Seed of one grid run: the first 8 bytes (little endian) of
/// SHA-256(seed, mu bits, sigma bits, replicate), all as little-endian u64.
pub fn cell_seed(seed: u64, mu: f64, sigma: f64, replicate: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(mu.to_bits().to_le_bytes());
    h.update(sigma.to_bits().to_le_bytes());
    h.update((replicate as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Evenly spaced grid from `start` to `end` inclusive, rounded to 1e-9 so
/// that values like 0.3 print cleanly.
pub fn linspace_step(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect()
}

pub const STANDARD_CELLS: usize = 66;
pub const STANDARD_REPLICATES: usize = 5;

/// mu in {0.25, 0.30, ..., 0.75} and sigma in {0.10, 0.15, ..., 0.35}.
pub fn standard_grid() -> Result<(Vec<f64>, Vec<f64>)> {
    let mu = linspace_step(0.25, 0.75, 0.05);
    let sigma = linspace_step(0.10, 0.35, 0.05);
    if mu.len() * sigma.len() != STANDARD_CELLS {
        return Err(Error::InvalidConfig(format!(
            "grid has {} x {} cells, expected {STANDARD_CELLS}",
            mu.len(),
            sigma.len()
        )));
    }
    Ok((mu, sigma))
}

/// Noise level of the standard grid preset.
pub const STANDARD_NOISE: f64 = 0.05;

/// The 66-cell grid with 5 replicates per cell, 258 words in 16 dimensions,
/// noise 0.05 and 100 robustness subsets per model.
pub fn standard_grid_preset(seed: u64) -> Result<(Vec<f64>, Vec<f64>, SynthConfig, GridOptions)> {
    let (mu, sigma) = standard_grid()?;
    let base = SynthConfig {
        noise: STANDARD_NOISE,
        seed,
        ..SynthConfig::default()
    };
    let options = GridOptions {
        replicates: STANDARD_REPLICATES,
        robustness_iterations: 100,
    };
    Ok((mu, sigma, base, options))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptions {
    pub replicates: usize,
    /// Subsets per model for the robustness measurement; 0 skips it.
    pub robustness_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRun {
    pub mu: f64,
    pub sigma: f64,
    pub replicate: usize,
    pub seed: u64,
    pub scores: Scores,
    pub r_squared: WordwiseFit,
    pub robustness: Option<Robustness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub mu: f64,
    pub sigma: f64,
    pub runs: usize,
    /// Mean and sample std over replicates, indexed like [`Metric::ALL`].
    pub mean: [Option<f64>; 6],
    pub std: [Option<f64>; 6],
    /// Mean word-wise R^2 for weat, mac, direct_bias, same.
    pub mean_r_squared: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub base: SynthConfig,
    pub options: GridOptions,
    pub mu_grid: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    /// Runs in grid order: mu outer, sigma inner, replicate innermost.
    pub runs: Vec<GridRun>,
    pub cells: Vec<CellSummary>,
    /// Word scores of the first run, for plotting.
    pub first_run_words: Option<WordScores>,
}

impl GridReport {
    /// Mean normalized robustness per metric over all runs.
    pub fn robustness_summary(&self) -> [Option<f64>; 6] {
        std::array::from_fn(|k| {
            let vals: Vec<f64> = self
                .runs
                .iter()
                .filter_map(|r| r.robustness.as_ref()?.normalized_mean_abs_diff[k])
                .collect();
            if vals.is_empty() { None } else { Some(mean(&vals)) }
        })
    }

    pub fn cell(&self, mu: f64, sigma: f64) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.mu == mu && c.sigma == sigma)
    }
}

fn run_one(base: &SynthConfig, mu: f64, sigma: f64, replicate: usize, options: GridOptions) -> Result<(GridRun, WordScores)> {
    let seed = cell_seed(base.seed, mu, sigma, replicate);
    let config = SynthConfig { mu, sigma, seed, ..*base };
    let model = PreparedModel::new(&generate(&config)?)?;
    let eval = model.evaluate()?;
    let robustness = if options.robustness_iterations > 0 {
        Some(model.subset_robustness(options.robustness_iterations, seed ^ 0x9e37_79b9_7f4a_7c15)?)
    } else {
        None
    };
    Ok((
        GridRun {
            mu,
            sigma,
            replicate,
            seed,
            scores: eval.scores,
            r_squared: eval.r_squared,
            robustness,
        },
        eval.words,
    ))
}

fn summarize(runs: &[GridRun]) -> CellSummary {
    let per_metric = |k: usize| runs.iter().filter_map(|r| r.scores[k]).collect::<Vec<f64>>();
    CellSummary {
        mu: runs[0].mu,
        sigma: runs[0].sigma,
        runs: runs.len(),
        mean: std::array::from_fn(|k| {
            let v = per_metric(k);
            (!v.is_empty()).then(|| mean(&v))
        }),
        std: std::array::from_fn(|k| {
            let v = per_metric(k);
            (!v.is_empty()).then(|| sample_std(&v))
        }),
        mean_r_squared: [
            mean(&runs.iter().map(|r| r.r_squared.weat).collect::<Vec<_>>()),
            mean(&runs.iter().map(|r| r.r_squared.mac).collect::<Vec<_>>()),
            mean(&runs.iter().map(|r| r.r_squared.direct_bias).collect::<Vec<_>>()),
            mean(&runs.iter().map(|r| r.r_squared.same).collect::<Vec<_>>()),
        ],
    }
}

/// Runs every (mu, sigma, replicate) combination in parallel; results keep grid order.
pub fn grid_run(mu_grid: &[f64], sigma_grid: &[f64], base: &SynthConfig, options: GridOptions) -> Result<GridReport> {
    if mu_grid.is_empty() || sigma_grid.is_empty() || options.replicates == 0 {
        return Err(Error::InvalidConfig("grids and replicate count must be non-empty".into()));
    }
    let jobs: Vec<(f64, f64, usize)> = mu_grid
        .iter()
        .flat_map(|&mu| sigma_grid.iter().flat_map(move |&s| (0..options.replicates).map(move |r| (mu, s, r))))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(mu, sigma, r)| run_one(base, mu, sigma, r, options))
        .collect::<Result<Vec<_>>>()?;
    let first_run_words = results.first().map(|(_, w)| w.clone());
    let runs: Vec<GridRun> = results.into_iter().map(|(r, _)| r).collect();
    let cells = runs.chunks(options.replicates).map(summarize).collect();
    Ok(GridReport {
        base: *base,
        options,
        mu_grid: mu_grid.to_vec(),
        sigma_grid: sigma_grid.to_vec(),
        runs,
        cells,
        first_run_words,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid_arithmetic() {
        let (mu, sigma) = standard_grid().unwrap();
        assert_eq!(mu.len(), 11);
        assert_eq!(sigma.len(), 6);
        assert_eq!(mu[1], 0.3);
        assert_eq!(*sigma.last().unwrap(), 0.35);
    }

    #[test]
    fn cell_seeds_differ_and_repeat() {
        let a = cell_seed(1, 0.25, 0.1, 0);
        assert_eq!(a, cell_seed(1, 0.25, 0.1, 0));
        assert_ne!(a, cell_seed(1, 0.25, 0.1, 1));
        assert_ne!(a, cell_seed(1, 0.3, 0.1, 0));
        assert_ne!(a, cell_seed(2, 0.25, 0.1, 0));
    }

    #[test]
    fn weat_split_halves_by_planted_bias() {
        let data = generate(&SynthConfig { n_words: 9, seed: 2, ..SynthConfig::default() }).unwrap();
        let m = PreparedModel::new(&data).unwrap();
        let idx: Vec<usize> = (0..9).collect();
        let (x, y) = m.weat_split(&idx);
        assert_eq!((x.len(), y.len()), (4, 4));
        let min_x = x.iter().map(|&i| m.p[i]).fold(f64::INFINITY, f64::min);
        let max_y = y.iter().map(|&i| m.p[i]).fold(f64::NEG_INFINITY, f64::max);
        assert!(min_x >= max_y);
    }

    #[test]
    fn single_cell_report() {
        let base = SynthConfig { n_words: 40, ..SynthConfig::default() };
        let opts = GridOptions { replicates: 1, robustness_iterations: 5 };
        let r = grid_run(&[0.5], &[0.2], &base, opts).unwrap();
        assert_eq!(r.runs.len(), 1);
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r, grid_run(&[0.5], &[0.2], &base, opts).unwrap());
        // exactly antipodal attributes: MAC is 1 for every word
        assert!((r.runs[0].scores[1].unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.runs[0].r_squared.mac, 0.0);
        assert!(r.runs[0].r_squared.same > 0.99);
        assert!(grid_run(&[], &[0.2], &base, opts).is_err());
    }

    #[test]
    fn robustness_is_deterministic_and_checks_size() {
        let data = generate(&SynthConfig { n_words: 30, noise: 0.05, seed: 5, ..SynthConfig::default() }).unwrap();
        let a = subset_robustness(&data, 10, 1).unwrap();
        assert_eq!(a, subset_robustness(&data, 10, 1).unwrap());
        let tiny = generate(&SynthConfig { n_words: 3, ..SynthConfig::default() }).unwrap();
        assert!(matches!(subset_robustness(&tiny, 10, 1), Err(Error::SubsetTooSmall(3))));
    }
}
