//! Metric commands: weat, same, mac, direct-bias, skew-stereo.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cosbias_core::direct_bias::direct_bias_per_word;
use cosbias_core::oracles::witness::defining_pairs;
use cosbias_core::same::{same_set_multi_reference_sweep, ContrastPair, ReferenceSweep};
use cosbias_core::{
    bias_direction_mean, bias_direction_pca, direct_bias, direct_bias_subspace_norm, mac_score, same_set_binary, same_set_multi,
    same_skew_stereo_multi, weat, Contrast, Error, ResolvedSets, StereotypeVariant, Vector,
};

use crate::inputs::{EmbeddingArgs, Workspace};
use crate::manifest::{emit, write_csv, RunManifest};
use crate::Status;

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional CSV mirror of the per-word scores.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeatArgs {
    #[command(flatten)]
    pub input: EmbeddingArgs,
    #[arg(long)]
    pub targets_x: PathBuf,
    #[arg(long)]
    pub targets_y: PathBuf,
    #[arg(long)]
    pub attr_a: PathBuf,
    #[arg(long)]
    pub attr_b: PathBuf,
    /// Partition budget for the p-value; 0 skips the test.
    #[arg(long, default_value_t = 10_000)]
    pub permutations: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SameArgs {
    #[command(flatten)]
    pub input: EmbeddingArgs,
    /// Target word lists, concatenated.
    #[arg(long, num_args = 1.., required = true)]
    pub targets: Vec<PathBuf>,
    /// Attribute word lists. Two lists give the binary score; more use the
    /// iterative form with the first list as reference.
    #[arg(long, num_args = 2.., required = true)]
    pub attrs: Vec<PathBuf>,
    /// Also report the multi-attribute score for every reference choice.
    #[arg(long)]
    pub sweep: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MacArgs {
    #[command(flatten)]
    pub input: EmbeddingArgs,
    #[arg(long, num_args = 1.., required = true)]
    pub targets: Vec<PathBuf>,
    #[arg(long, num_args = 1.., required = true)]
    pub attrs: Vec<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionArg {
    Pca,
    Mean,
}

#[derive(Debug, Args)]
pub struct DirectBiasArgs {
    #[command(flatten)]
    pub input: EmbeddingArgs,
    /// Neutral word lists, concatenated.
    #[arg(long, num_args = 1.., required = true)]
    pub targets: Vec<PathBuf>,
    /// JSON object of named token lists, or a list of token lists.
    #[arg(long)]
    pub defining_sets: PathBuf,
    /// Principal components to keep.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Strictness exponent.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, value_enum, default_value = "pca")]
    pub direction: DirectionArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ContrastArg {
    AllPairs,
    OneVsRest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    /// Root of the summed squares divided by n.
    AsWritten,
    /// Population standard deviation.
    PopulationStd,
}

#[derive(Debug, Args)]
pub struct SkewStereoArgs {
    #[command(flatten)]
    pub input: EmbeddingArgs,
    #[arg(long, num_args = 1.., required = true)]
    pub targets: Vec<PathBuf>,
    #[arg(long, num_args = 2.., required = true)]
    pub attrs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "all-pairs")]
    pub contrast: ContrastArg,
    #[arg(long, value_enum, default_value = "as-written")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Metric errors that mean "undefined for this input" rather than bad input.
fn undefined_reason(e: &anyhow::Error) -> Option<String> {
    match e.downcast_ref::<Error>()? {
        err @ (Error::UndefinedEffectSize
        | Error::IdenticalAttributeMeans
        | Error::DegenerateMean
        | Error::DegenerateDefiningSet { .. }
        | Error::DegenerateStdDev) => Some(err.to_string()),
        _ => None,
    }
}

/// Emits the report from `compute`, or an `undefined` report with exit
/// status 2 when the metric is undefined on this input.
fn finish<T: Serialize>(output: &OutputArgs, manifest: &RunManifest, computed: Result<T>) -> Result<Status> {
    match computed {
        Ok(body) => {
            emit(output.out.as_deref(), body, manifest)?;
            Ok(Status::Success)
        }
        Err(e) => match undefined_reason(&e) {
            Some(reason) => {
                eprintln!("metric undefined: {reason}");
                emit(output.out.as_deref(), json!({ "undefined": true, "reason": reason }), manifest)?;
                Ok(Status::Undefined)
            }
            None => Err(e),
        },
    }
}

fn missing_json(sets: &ResolvedSets) -> Value {
    serde_json::to_value(&sets.missing).unwrap_or(Value::Null)
}

fn fmt(x: f64) -> String {
    x.to_string()
}

pub fn run_weat(args: &WeatArgs, seed: u64) -> Result<Status> {
    let mut manifest = RunManifest::new("weat", seed);
    let mut ws = Workspace::load(&args.input, &mut manifest)?;
    ws.target("x", &args.targets_x, &mut manifest)?;
    ws.target("y", &args.targets_y, &mut manifest)?;
    ws.attribute("a", &args.attr_a, &mut manifest)?;
    ws.attribute("b", &args.attr_b, &mut manifest)?;
    manifest.param("permutations", args.permutations);
    let sets = ws.resolve()?;

    let (x, y) = (sets.target("x")?, sets.target("y")?);
    let result = match weat(x, y, sets.attribute("a")?, sets.attribute("b")?, args.permutations, seed) {
        Ok(r) => r,
        Err(e) => return finish::<Value>(&args.output, &manifest, Err(e.into())),
    };
    if let Some(path) = &args.output.csv {
        let rows = x
            .tokens
            .iter()
            .map(|t| ("x", t))
            .chain(y.tokens.iter().map(|t| ("y", t)))
            .map(|(set, t)| vec![set.to_owned(), t.clone(), fmt(result.word_associations[t])]);
        write_csv(path, &["set", "token", "association"], rows)?;
    }
    let defined = result.effect_size.is_some();
    match result.effect_size {
        Some(d) => eprintln!("effect size {d:.6}, test statistic {:.6}", result.test_statistic),
        None => eprintln!("effect size undefined: association standard deviation is zero"),
    }
    let mut body = serde_json::to_value(&result)?;
    body["missing"] = missing_json(&sets);
    emit(args.output.out.as_deref(), body, &manifest)?;
    Ok(if defined { Status::Success } else { Status::Undefined })
}

#[derive(Serialize)]
struct WordScore<'a> {
    token: &'a str,
    score: f64,
}

fn word_scores<'a>(tokens: &'a [String], scores: &[f64]) -> Vec<WordScore<'a>> {
    tokens.iter().zip(scores).map(|(t, &score)| WordScore { token: t, score }).collect()
}

fn per_word_csv(path: Option<&Path>, tokens: &[String], scores: &[f64], column: &str) -> Result<()> {
    if let Some(path) = path {
        let rows = tokens.iter().zip(scores).map(|(t, s)| vec![t.clone(), fmt(*s)]);
        write_csv(path, &["token", column], rows)?;
    }
    Ok(())
}

pub fn run_same(args: &SameArgs, seed: u64) -> Result<Status> {
    let mut manifest = RunManifest::new("same", seed);
    let mut ws = Workspace::load(&args.input, &mut manifest)?;
    ws.targets(&args.targets, &mut manifest)?;
    let names = ws.attributes(&args.attrs, &mut manifest)?;
    manifest.param("sweep", args.sweep);
    let sets = ws.resolve()?;
    let words = sets.target("targets")?;
    let attrs: Vec<&[Vector]> = names
        .iter()
        .map(|n| sets.attribute(n).map(|s| s.vectors.as_slice()))
        .collect::<Result<_, _>>()?;

    let computed = (|| -> Result<Value> {
        let result = if attrs.len() == 2 {
            same_set_binary(&words.vectors, attrs[0], attrs[1])?
        } else {
            same_set_multi(&words.vectors, &attrs)?
        };
        let sweep: Option<ReferenceSweep> = if args.sweep && attrs.len() > 2 {
            Some(same_set_multi_reference_sweep(&words.vectors, &attrs)?)
        } else {
            None
        };
        eprintln!("SAME {:?} set score {:.6}", result.mode, result.set_score);
        per_word_csv(args.output.csv.as_deref(), &words.tokens, &result.per_word, "same")?;
        Ok(json!({
            "mode": result.mode,
            "set_score": result.set_score,
            "per_word": word_scores(&words.tokens, &result.per_word),
            "pairwise_directions": result.pairwise_directions,
            "attribute_sets": names,
            "reference_set": names[0],
            "reference_sweep": sweep,
            "missing": missing_json(&sets),
        }))
    })();
    finish(&args.output, &manifest, computed)
}

pub fn run_mac(args: &MacArgs, seed: u64) -> Result<Status> {
    let mut manifest = RunManifest::new("mac", seed);
    let mut ws = Workspace::load(&args.input, &mut manifest)?;
    ws.targets(&args.targets, &mut manifest)?;
    let names = ws.attributes(&args.attrs, &mut manifest)?;
    let sets = ws.resolve()?;
    let words = sets.target("targets")?;
    let attrs: Vec<&[Vector]> = names
        .iter()
        .map(|n| sets.attribute(n).map(|s| s.vectors.as_slice()))
        .collect::<Result<_, _>>()?;

    let result = mac_score(&words.vectors, &attrs)?;
    eprintln!("MAC {:.6}", result.score);
    if let Some(path) = &args.output.csv {
        let mut header = vec!["token"];
        header.extend(names.iter().map(String::as_str));
        let rows = words.tokens.iter().zip(&result.per_word_per_set).map(|(t, ds)| {
            let mut row = vec![t.clone()];
            row.extend(ds.iter().map(|d| fmt(*d)));
            row
        });
        write_csv(path, &header, rows)?;
    }
    let per_word: Vec<Value> = words
        .tokens
        .iter()
        .zip(&result.per_word_per_set)
        .map(|(t, ds)| {
            let per_set: serde_json::Map<String, Value> =
                names.iter().zip(ds).map(|(n, d)| (n.clone(), json!(d))).collect();
            json!({ "token": t, "distance": per_set })
        })
        .collect();
    let body = json!({
        "score": result.score,
        "deviation_from_ideal": result.deviation_from_ideal,
        "per_word": per_word,
        "attribute_sets": names,
        "missing": missing_json(&sets),
    });
    finish(&args.output, &manifest, Ok(body))
}

pub fn run_direct_bias(args: &DirectBiasArgs, seed: u64) -> Result<Status> {
    let mut manifest = RunManifest::new("direct-bias", seed);
    let mut ws = Workspace::load(&args.input, &mut manifest)?;
    ws.targets(&args.targets, &mut manifest)?;
    ws.defining(&args.defining_sets, &mut manifest)?;
    manifest.param("k", args.k);
    manifest.param("c", args.c);
    manifest.param("direction", args.direction);
    let sets = ws.resolve()?;
    let neutral = sets.target("targets")?;
    let defining = sets.defining_vectors();

    let computed = (|| -> Result<Value> {
        let (g, subspace) = match args.direction {
            DirectionArg::Pca => {
                let sub = bias_direction_pca(&defining, args.k).context("estimating the bias subspace")?;
                for w in &sub.warnings {
                    log::warn!("bias subspace: {w:?}");
                }
                (sub.direction().clone(), Some(sub))
            }
            DirectionArg::Mean => (bias_direction_mean(&defining_pairs(&defining)?)?, None),
        };
        let per_word = direct_bias_per_word(&neutral.vectors, &g, args.c)?;
        let score = direct_bias(&neutral.vectors, &g, args.c)?;
        let subspace_score = match &subspace {
            Some(s) if s.basis.len() > 1 => Some(direct_bias_subspace_norm(&neutral.vectors, &s.basis, args.c)?),
            _ => None,
        };
        eprintln!("direct bias {score:.6}");
        per_word_csv(args.output.csv.as_deref(), &neutral.tokens, &per_word, "direct_bias")?;
        Ok(json!({
            "direct_bias": score,
            "per_word": word_scores(&neutral.tokens, &per_word),
            "direction": g,
            "subspace": subspace,
            "subspace_direct_bias": subspace_score,
            "missing": missing_json(&sets),
        }))
    })();
    finish(&args.output, &manifest, computed)
}

pub fn run_skew_stereo(args: &SkewStereoArgs, seed: u64) -> Result<Status> {
    let mut manifest = RunManifest::new("skew-stereo", seed);
    let mut ws = Workspace::load(&args.input, &mut manifest)?;
    ws.targets(&args.targets, &mut manifest)?;
    let names = ws.attributes(&args.attrs, &mut manifest)?;
    let (contrast, variant) = (
        match args.contrast {
            ContrastArg::AllPairs => Contrast::AllPairs,
            ContrastArg::OneVsRest => Contrast::OneVsRest,
        },
        match args.variant {
            VariantArg::AsWritten => StereotypeVariant::AsWritten,
            VariantArg::PopulationStd => StereotypeVariant::PopulationStd,
        },
    );
    manifest.param("contrast", contrast);
    manifest.param("variant", variant);
    let sets = ws.resolve()?;
    let words = sets.target("targets")?;
    let attrs: Vec<&[Vector]> = names
        .iter()
        .map(|n| sets.attribute(n).map(|s| s.vectors.as_slice()))
        .collect::<Result<_, _>>()?;

    let computed = (|| -> Result<Value> {
        let rows = same_skew_stereo_multi(&words.vectors, &attrs, contrast, variant)?;
        let labelled: Vec<(String, String, f64, f64)> = rows
            .iter()
            .map(|r| {
                let (first, second) = match r.pair {
                    ContrastPair::Pair { first, second } => (names[first].clone(), names[second].clone()),
                    ContrastPair::OneVsRest { index } => (names[index].clone(), "rest".to_owned()),
                };
                (first, second, r.skew, r.stereotype)
            })
            .collect();
        for (a, b, skew, stereo) in &labelled {
            eprintln!("{a} vs {b}: skew {skew:.6}, stereotype {stereo:.6}");
        }
        if let Some(path) = &args.output.csv {
            let csv_rows = labelled.iter().map(|(a, b, s, t)| vec![a.clone(), b.clone(), fmt(*s), fmt(*t)]);
            write_csv(path, &["first", "second", "skew", "stereotype"], csv_rows)?;
        }
        let rows: Vec<Value> = labelled
            .iter()
            .map(|(a, b, skew, stereo)| json!({ "first": a, "second": b, "skew": skew, "stereotype": stereo }))
            .collect();
        Ok(json!({
            "contrast": contrast,
            "variant": variant,
            "rows": rows,
            "missing": missing_json(&sets),
        }))
    })();
    finish(&args.output, &manifest, computed)
}
