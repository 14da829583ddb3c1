//! Runs every witness and randomized range check and collects pass/fail results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::oracles::bounds::{check_standardized_sum_bound, random_standardized_sum_draws, random_weat_effect_sizes};
use crate::oracles::search::{search_same_binary_max, search_same_multi_max};
use crate::oracles::witness::{all_witnesses, witness_mac_blindspot, witness_weat_extremal, Witness};
use crate::oracles::{random_orthogonal, random_unit, random_vector};
use crate::same::{mean_difference, same_word_multi_from_means};
use crate::similarity::{attribute_mean, cosine};
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Witness constructions and their transformed copies.
    Theorems,
    /// Randomized range and bound checks.
    Bounds,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Random draws for the range checks.
    pub iterations: usize,
    /// Restarts for supremum searches.
    pub restarts: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            iterations: 100_000,
            restarts: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteEntry {
    pub name: String,
    pub passed: bool,
    /// Set when the observed behavior contradicts a published claim and the
    /// contradiction is the expected outcome.
    pub discrepancy: Option<String>,
    pub failures: Vec<String>,
    pub details: Value,
}

impl SuiteEntry {
    fn new(name: &str, failures: Vec<String>, details: Value) -> Self {
        SuiteEntry {
            name: name.into(),
            passed: failures.is_empty(),
            discrepancy: None,
            failures,
            details,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn failed(&self) -> impl Iterator<Item = &SuiteEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

pub fn run_suite(suite: Suite, options: SuiteOptions) -> Result<SuiteReport> {
    let mut entries = Vec::new();
    if matches!(suite, Suite::Theorems | Suite::All) {
        entries.extend(witness_entries(options)?);
    }
    if matches!(suite, Suite::Bounds | Suite::All) {
        entries.extend(bound_entries(options)?);
    }
    Ok(SuiteReport {
        suite,
        seed: options.seed,
        passed: entries.iter().all(|e| e.passed),
        entries,
    })
}

fn witness_entry(name: &str, w: &Witness) -> Result<SuiteEntry> {
    let outcomes = w.evaluate()?;
    let failures = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{}.{}: expected {}, observed {:?}", w.name, o.name, o.expected, o.observed))
        .collect();
    Ok(SuiteEntry::new(name, failures, serde_json::to_value(&outcomes)?))
}

fn witness_entries(options: SuiteOptions) -> Result<Vec<SuiteEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut entries = Vec::new();
    for w in all_witnesses()? {
        entries.push(witness_entry(&w.name, &w)?);
        // rotated and rescaled copies must satisfy the same checks
        let mut failures = Vec::new();
        for _ in 0..20 {
            let q = random_orthogonal(&mut rng, w.embeddings.dim());
            let scale = 10f64.powf(rng.random_range(-2.0..2.0));
            let moved = w.transformed(&q, scale)?;
            failures.extend(
                witness_entry("", &moved)?
                    .failures
                    .into_iter()
                    .map(|f| format!("scale {scale:.4}: {f}")),
            );
        }
        entries.push(SuiteEntry::new(&format!("{}_invariance", w.name), failures, json!({"copies": 20})));
    }

    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let a: Vec<Vector> = (0..rng.random_range(1..=4)).map(|_| random_vector(&mut rng, 8)).collect();
        let b: Vec<Vector> = (0..rng.random_range(1..=4)).map(|_| random_vector(&mut rng, 8)).collect();
        let w = witness_weat_extremal(5, &a, &b)?;
        let outcome = w.evaluate()?;
        for o in outcome.iter().filter(|o| o.name == "weat_effect_size") {
            worst = worst.max((o.observed.unwrap_or(f64::NAN) - 2.0).abs());
            if !o.passed {
                failures.push(format!("configuration {k}: effect size {:?}", o.observed));
            }
        }
    }
    entries.push(SuiteEntry::new(
        "weat_extremal_random_attributes",
        failures,
        json!({"configurations": 100, "max_abs_error": worst}),
    ));

    let mut failures = Vec::new();
    for k in 0..1000 {
        let alpha = std::f64::consts::TAU * k as f64 / 1000.0;
        let w = witness_mac_blindspot(alpha)?;
        if !w.passes()? {
            failures.push(format!("alpha {alpha}"));
        }
    }
    entries.push(SuiteEntry::new("mac_blindspot_sweep", failures, json!({"angles": 1000})));

    let probe = search_same_multi_max(2, 3, options.restarts, options.seed)?;
    let mut entry = SuiteEntry::new(
        "same_multi_bound_probe",
        if probe.max_found >= 1.2071067 {
            vec![]
        } else {
            vec![format!("search found only {}", probe.max_found)]
        },
        serde_json::to_value(&probe)?,
    );
    entry.discrepancy = Some(format!(
        "multi-attribute SAME reaches {:.10} > 1 for 3 attribute sets in 2 dimensions; the stated upper bound of 1 does not hold",
        probe.max_found
    ));
    entries.push(entry);
    Ok(entries)
}

fn bound_entries(options: SuiteOptions) -> Result<Vec<SuiteEntry>> {
    let mut entries = Vec::new();
    let n = options.iterations;

    let weat = random_weat_effect_sizes(n, options.seed);
    entries.push(SuiteEntry::new(
        "weat_effect_size_range",
        if weat.violations == 0 {
            vec![]
        } else {
            vec![format!("{} draws exceed |d| <= 2", weat.violations)]
        },
        serde_json::to_value(&weat)?,
    ));

    let sums = random_standardized_sum_draws(n, options.seed);
    let eq = check_standardized_sum_bound(&[-1.0, -1.0, 1.0, 1.0], &[0, 1])?;
    let mut failures = Vec::new();
    if sums.violations > 0 {
        failures.push(format!("{} draws exceed the bound", sums.violations));
    }
    if !eq.at_equality {
        failures.push(format!("equality case gives {} vs {}", eq.lhs, eq.bound));
    }
    entries.push(SuiteEntry::new(
        "standardized_sum_bound",
        failures,
        json!({"random": sums, "equality_case": eq}),
    ));

    let instances = (n / 10).max(1);
    let report = same_trustworthiness(instances, options.seed);
    entries.push(SuiteEntry::new(
        "same_zero_iff_equidistant",
        report.0,
        json!({"instances": instances, "max_equidistant": report.1, "min_perturbed": report.2}),
    ));

    let (failures, worst) = same_binary_extrema(100, options.seed)?;
    entries.push(SuiteEntry::new(
        "same_binary_supremum",
        failures,
        json!({"attribute_pairs": 100, "max_abs_error": worst}),
    ));

    let binary = search_same_multi_max(3, 2, options.restarts.min(16), options.seed)?;
    entries.push(SuiteEntry::new(
        "same_multi_two_sets_bound",
        if binary.max_found <= 1.0 + 1e-9 {
            vec![]
        } else {
            vec![format!("two-set search found {}", binary.max_found)]
        },
        serde_json::to_value(&binary)?,
    ));

    let hand = same_word_multi_from_means(
        &Vector::from_slice(&[1.0, 0.0]),
        &[
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[0.0, 1.0]),
            Vector::from_slice(&[-1.0, 0.0]),
        ],
    )?;
    entries.push(SuiteEntry::new(
        "same_multi_hand_example",
        if (hand - 1.2071067811865475).abs() <= 1e-9 {
            vec![]
        } else {
            vec![format!("hand example gives {hand}")]
        },
        json!({"value": hand}),
    ));
    Ok(entries)
}

/// Random attribute sets in dimension 2..=16 with 1..=4 members each.
fn random_attribute_pair<R: Rng>(rng: &mut R) -> (usize, Vec<Vector>, Vec<Vector>) {
    let dim = rng.random_range(2..=16);
    let a = (0..rng.random_range(1..=4)).map(|_| random_vector(rng, dim)).collect();
    let b = (0..rng.random_range(1..=4)).map(|_| random_vector(rng, dim)).collect();
    (dim, a, b)
}

/// Words equidistant (in mean cosine) to two random attribute sets must score
/// 0; moving them by at least 1e-3 along the pair direction must not.
/// Returns failures, the largest equidistant score and the smallest perturbed one.
pub fn same_trustworthiness(instances: usize, seed: u64) -> (Vec<String>, f64, f64) {
    let rows: Vec<Option<(f64, f64)>> = (0..instances)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let (dim, a, b) = random_attribute_pair(&mut rng);
            let d = mean_difference(&attribute_mean(&a).ok()?.vector, &attribute_mean(&b).ok()?.vector).ok()?;
            let u = d.normalized().ok()?;
            let raw = random_unit(&mut rng, dim);
            let w = raw.add_scaled(-raw.dot(&u), &u).normalized().ok()?;
            let eps = rng.random_range(1e-3..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let moved = w.add_scaled(eps, &u);
            Some((cosine(&w, &d).ok()?.abs(), cosine(&moved, &d).ok()?.abs()))
        })
        .collect();
    let mut failures = Vec::new();
    let (mut max_zero, mut min_moved) = (0.0f64, f64::INFINITY);
    for (k, row) in rows.into_iter().enumerate() {
        match row {
            Some((zero, moved)) => {
                max_zero = max_zero.max(zero);
                min_moved = min_moved.min(moved);
                if zero > 1e-9 {
                    failures.push(format!("instance {k}: equidistant word scores {zero}"));
                }
                if moved <= 1e-4 {
                    failures.push(format!("instance {k}: perturbed word scores {moved}"));
                }
            }
            None => failures.push(format!("instance {k}: degenerate draw")),
        }
    }
    (failures, max_zero, min_moved)
}

/// For random attribute pairs, the searched supremum of the pairwise score is
/// 1 and is attained on `±unit(â_i - â_j)`.
pub fn same_binary_extrema(pairs: usize, seed: u64) -> Result<(Vec<String>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..pairs {
        let (_, a, b) = random_attribute_pair(&mut rng);
        let (mi, mj) = (attribute_mean(&a)?.vector, attribute_mean(&b)?.vector);
        let (best, argmax) = search_same_binary_max(&mi, &mj, 4, seed.wrapping_add(k as u64))?;
        let u = mean_difference(&mi, &mj)?.normalized()?;
        let alignment = argmax.dot(&u).abs();
        let at_u = cosine(&u, &(&mi - &mj))?;
        let at_neg = cosine(&-&u, &(&mi - &mj))?;
        worst = worst.max((best - 1.0).abs());
        if (best - 1.0).abs() > 1e-6 || alignment < 1.0 - 1e-6 || (at_u - 1.0).abs() > 1e-12 || (at_neg + 1.0).abs() > 1e-12 {
            failures.push(format!(
                "pair {k}: sup {best}, alignment {alignment}, at ±u {at_u} / {at_neg}"
            ));
        }
    }
    Ok((failures, worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = run_suite(
            Suite::All,
            SuiteOptions {
                seed: 1,
                iterations: 2000,
                restarts: 32,
            },
        )
        .unwrap();
        if let Some(e) = report.failed().next() {
            panic!("{}: {:?}", e.name, e.failures);
        }
        assert!(report.passed);
        let probe = report.entries.iter().find(|e| e.name == "same_multi_bound_probe").unwrap();
        assert!(probe.discrepancy.is_some());
    }
}
