use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};

use cosbias_core::synth::grid::{grid_run, standard_grid_preset, GridOptions, Metric};
use cosbias_core::synth::report::write_grid_outputs;
use cosbias_core::synth::SynthConfig;

use crate::manifest::RunManifest;
use crate::Status;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    /// 11 mu values x 6 sigma values x 5 replicates, noise 0.05.
    #[value(name = "paper-grid")]
    StandardGrid,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, conflicts_with_all = ["mu", "sigma", "dim", "words", "noise", "replicates"])]
    pub preset: Option<Preset>,
    /// Mean planted bias; comma-separated for a grid.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub mu: Vec<f64>,
    /// Spread of planted bias; comma-separated for a grid.
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    pub sigma: Vec<f64>,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 258)]
    pub words: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 8)]
    pub attrs_per_side: usize,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Random subsets per model for the robustness measurement; 0 skips it.
    #[arg(long, default_value_t = 100)]
    pub robustness_iterations: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run_synth(args: &SynthArgs, seed: u64) -> Result<Status> {
    let (mu, sigma, base, options) = match args.preset {
        Some(Preset::StandardGrid) => {
            let (mu, sigma, base, mut options) = standard_grid_preset(seed)?;
            options.robustness_iterations = args.robustness_iterations;
            (mu, sigma, SynthConfig { n_attrs_per_side: args.attrs_per_side, ..base }, options)
        }
        None => (
            args.mu.clone(),
            args.sigma.clone(),
            SynthConfig {
                dim: args.dim,
                n_words: args.words,
                mu: args.mu.first().copied().unwrap_or(0.5),
                sigma: args.sigma.first().copied().unwrap_or(0.2),
                noise: args.noise,
                n_attrs_per_side: args.attrs_per_side,
                seed,
            },
            GridOptions {
                replicates: args.replicates,
                robustness_iterations: args.robustness_iterations,
            },
        ),
    };
    let mut manifest = RunManifest::new("synth", seed);
    manifest.param("preset", args.preset.map(|_| "paper-grid"));
    manifest.param("mu", &mu);
    manifest.param("sigma", &sigma);
    manifest.param("dim", base.dim);
    manifest.param("words", base.n_words);
    manifest.param("noise", base.noise);
    manifest.param("attrs_per_side", base.n_attrs_per_side);
    manifest.param("replicates", options.replicates);
    manifest.param("robustness_iterations", options.robustness_iterations);

    let report = grid_run(&mu, &sigma, &base, options).context("running the synthetic grid")?;
    let manifest = serde_json::to_value(&manifest)?;
    let files = write_grid_outputs(&report, &args.out_dir, &manifest)?;

    eprintln!("{} runs over {} cells", report.runs.len(), report.cells.len());
    let rob = report.robustness_summary();
    for m in Metric::ALL {
        if let Some(v) = rob[m as usize] {
            eprintln!("robustness {:<12} {v:.6}", m.name());
        }
    }
    for f in files {
        println!("{}", f.display());
    }
    Ok(Status::Success)
}
