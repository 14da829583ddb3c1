use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};

use cosbias_core::oracles::suite::{run_suite, Suite, SuiteOptions};

use crate::manifest::{emit, RunManifest};
use crate::Status;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Theorems,
    Bounds,
    All,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    /// Random draws per range check.
    #[arg(long, default_value_t = 100_000)]
    pub iterations: usize,
    /// Restarts per supremum search.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_validate(args: &ValidateArgs, seed: u64) -> Result<Status> {
    let suite = match args.suite {
        SuiteArg::Theorems => Suite::Theorems,
        SuiteArg::Bounds => Suite::Bounds,
        SuiteArg::All => Suite::All,
    };
    let mut manifest = RunManifest::new("validate", seed);
    manifest.param("suite", suite);
    manifest.param("iterations", args.iterations);
    manifest.param("restarts", args.restarts);

    let report = run_suite(
        suite,
        SuiteOptions {
            seed,
            iterations: args.iterations,
            restarts: args.restarts,
        },
    )?;
    for e in &report.entries {
        eprintln!("{} {}", if e.passed { "PASS" } else { "FAIL" }, e.name);
        if let Some(d) = &e.discrepancy {
            eprintln!("     discrepancy: {d}");
        }
    }
    let failed: Vec<_> = report.failed().collect();
    for e in &failed {
        for f in &e.failures {
            eprintln!("failed predicate in {}: {f}", e.name);
        }
    }
    eprintln!("{}/{} checks passed", report.entries.len() - failed.len(), report.entries.len());
    let status = if failed.is_empty() { Status::Success } else { Status::ValidationFailed };
    emit(args.out.as_deref(), &report, &manifest)?;
    Ok(status)
}
