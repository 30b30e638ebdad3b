use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;

use symseries::generator::generate_dataset;
use symseries::io::{load_config, validate_dir, Command, RunConfig};
use symseries::losses::run_selftest;

mod tables;

#[derive(Parser)]
#[command(name = "symseries", version, about = "Series-symbol data generation and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate every (M, N) cell into one shard per cell plus a manifest.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Profile every channel of every record in a shard directory.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Project a stats CSV onto the Radviz disk.
    Radviz {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mask extra points and fill every gap from its neighbours.
    Preinterp {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Fraction of points to hide in addition to the empty fields.
        #[arg(long, default_value_t = 0.0)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check every shard and record of a generated dataset.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run the loss invariant and oracle checks.
    LossesSelftest {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn config_for(path: Option<&Path>, command: Command) -> Result<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::new(command));
    };
    let cfg = load_config(path).with_context(|| format!("loading {}", path.display()))?;
    if cfg.command != command {
        bail!("{} is a {:?} config, not {:?}", path.display(), cfg.command, command);
    }
    Ok(cfg)
}

/// Returns whether every check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Cmd::Generate { config, workers, out } => {
            let cfg = config_for(Some(&config), Command::Generate)?;
            let Some(out) = out.or(cfg.output.clone()) else {
                bail!("no output directory: pass --out or set \"output\" in the config");
            };
            let manifest = generate_dataset(&cfg.generate, workers, &out)?;
            let failures: usize = manifest.cells.iter().map(|c| c.failures).sum();
            println!(
                "generated {} pairs in {} shards ({} abandoned draws)",
                manifest.total_pairs,
                manifest.cells.len(),
                failures
            );
            Ok(true)
        }
        Cmd::Stats { input, out, config } => {
            let cfg = config_for(config.as_deref(), Command::Stats)?;
            let rows = tables::write_stats(&input, &out, &cfg.stats)?;
            println!("profiled {rows} series into {}", out.display());
            Ok(true)
        }
        Cmd::Radviz { input, out } => {
            let n = tables::write_radviz(&input, &out)?;
            println!("projected {n} profiles into {}", out.display());
            Ok(true)
        }
        Cmd::Preinterp { input, out, ratio, seed } => {
            let filled = tables::write_preinterp(&input, &out, ratio, seed)?;
            println!("filled {filled} points into {}", out.display());
            Ok(true)
        }
        Cmd::Validate { input } => {
            let report = validate_dir(&input)?;
            for p in &report.problems {
                println!("FAIL {p}");
            }
            println!(
                "{}: {} shards, {} records, {} values, {} problems",
                if report.is_ok() { "PASS" } else { "FAIL" },
                report.shards,
                report.records,
                report.floats,
                report.problems.len()
            );
            Ok(report.is_ok())
        }
        Cmd::LossesSelftest { config, cases, seed } => {
            let cfg = config_for(config.as_deref(), Command::LossesSelftest)?;
            let cases = cases.unwrap_or(cfg.losses.selftest_cases);
            let report = run_selftest(&cfg.losses.similarity, cases, seed);
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            info!("{} of {} checks passed", report.checks.iter().filter(|c| c.passed).count(), report.checks.len());
            Ok(report.all_passed())
        }
    }
}
