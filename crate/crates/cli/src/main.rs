//! `cosbias`: cosine-based bias metrics on embedding files.
//!
//! Exit codes: 0 success, 1 input error, 2 metric undefined on the input,
//! 3 validation failure.

mod inputs;
mod manifest;
mod metrics;
mod synth;
mod validate;
mod witness;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use metrics::{DirectBiasArgs, MacArgs, SameArgs, SkewStereoArgs, WeatArgs};
use synth::SynthArgs;
use validate::ValidateArgs;
use witness::WitnessCommand;

#[derive(Debug, Parser)]
#[command(name = "cosbias", version, about = "Cosine-based bias metrics for word embeddings")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "COSBIAS_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Effect size, test statistic and permutation p-value.
    Weat(WeatArgs),
    /// Binary or multi-attribute SAME score.
    Same(SameArgs),
    /// Mean average cosine distance.
    Mac(MacArgs),
    /// Direct Bias against a direction estimated from defining sets.
    DirectBias(DirectBiasArgs),
    /// SAME skew and stereotype per attribute contrast.
    SkewStereo(SkewStereoArgs),
    /// Run the witness and bound suites.
    Validate(ValidateArgs),
    /// Generate synthetic embeddings over a (mu, sigma) grid and score them.
    Synth(SynthArgs),
    #[command(subcommand)]
    Witness(WitnessCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Undefined,
    ValidationFailed,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Undefined => 2,
            Status::ValidationFailed => 3,
        }
    }
}

fn run(cli: &Cli) -> Result<Status> {
    let seed = cli.seed;
    match &cli.command {
        Command::Weat(a) => metrics::run_weat(a, seed),
        Command::Same(a) => metrics::run_same(a, seed),
        Command::Mac(a) => metrics::run_mac(a, seed),
        Command::DirectBias(a) => metrics::run_direct_bias(a, seed),
        Command::SkewStereo(a) => metrics::run_skew_stereo(a, seed),
        Command::Validate(a) => validate::run_validate(a, seed),
        Command::Synth(a) => synth::run_synth(a, seed),
        Command::Witness(c) => witness::run_witness(c, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
