use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde_json::json;

use cosbias_core::oracles::witness::{all_witnesses, Witness};

use crate::manifest::{emit, RunManifest};
use crate::Status;

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Write witness bundles, one directory per witness.
    Write(WriteArgs),
    /// Evaluate the expectations stored in a bundle.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct WriteArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Only write these witnesses (default: all).
    #[arg(long)]
    pub name: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Bundle directory.
    pub bundle: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_witness(cmd: &WitnessCommand, seed: u64) -> Result<Status> {
    match cmd {
        WitnessCommand::Write(args) => {
            let witnesses = all_witnesses()?;
            if let Some(unknown) = args.name.iter().find(|n| !witnesses.iter().any(|w| &w.name == *n)) {
                let known: Vec<&str> = witnesses.iter().map(|w| w.name.as_str()).collect();
                bail!("unknown witness {unknown:?}; known: {}", known.join(", "));
            }
            for w in witnesses.iter().filter(|w| args.name.is_empty() || args.name.contains(&w.name)) {
                let dir = args.out_dir.join(&w.name);
                w.write_bundle(&dir).with_context(|| format!("writing bundle {}", dir.display()))?;
                println!("{}", dir.display());
            }
            Ok(Status::Success)
        }
        WitnessCommand::Check(args) => {
            let mut manifest = RunManifest::new("witness check", seed);
            for f in ["embeddings.txt", "config.json", "expected.json"] {
                manifest.input(&args.bundle.join(f))?;
            }
            let w = Witness::read_bundle(&args.bundle).with_context(|| format!("reading {}", args.bundle.display()))?;
            let outcomes = w.evaluate()?;
            for o in &outcomes {
                eprintln!(
                    "{} {}: expected {}, observed {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.name,
                    o.expected,
                    o.observed.map(|x| x.to_string()).or(o.error.clone()).unwrap_or_default()
                );
            }
            let passed = outcomes.iter().all(|o| o.passed);
            emit(
                args.out.as_deref(),
                json!({ "witness": w.name, "provenance": w.provenance, "passed": passed, "checks": outcomes }),
                &manifest,
            )?;
            Ok(if passed { Status::Success } else { Status::ValidationFailed })
        }
    }
}
