//! `medpower` command-line interface.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use medpower::orchestrate::{self, ExecOptions, ExecuteSummary, GridConfig, Shard};
use medpower::report;
use medpower::verify;

#[derive(Parser)]
#[command(name = "medpower", version, about = "Bootstrap power analysis for simple mediation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the scenario manifest for a grid config.
    Plan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run pending scenarios of a grid.
    Run(RunArgs),
    /// Rescan the results directory, then run whatever is missing.
    Resume(RunArgs),
    /// Build a figure table and charts from results.
    Report {
        /// Results directory or merged results.csv.
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=7))]
        figure: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the numerical kernels against reference implementations.
    Verify {
        #[arg(long, default_value_t = 20240101)]
        seed: u64,
    },
    /// Concatenate all result records into one table.
    Merge {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Residue class `k/K` of scenario ids to run.
    #[arg(long, default_value = "0/1")]
    shard: Shard,
    /// Scenarios run concurrently (defaults to available cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Maximum scenarios started by this invocation.
    #[arg(long)]
    cap: Option<usize>,
}

impl RunArgs {
    fn options(&self) -> Result<ExecOptions> {
        let workers = match self.workers {
            Some(0) => bail!("--workers must be at least 1"),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(ExecOptions {
            shard: self.shard,
            workers,
            cap: self.cap,
        })
    }
}

fn load_config(path: &std::path::Path) -> Result<GridConfig> {
    GridConfig::load(path).with_context(|| format!("reading config {}", path.display()))
}

fn report_run(summary: &ExecuteSummary) -> ExitCode {
    for (id, err) in &summary.failed {
        eprintln!("scenario {id} failed: {err}");
    }
    println!(
        "completed {}, failed {}, remaining {}",
        summary.completed.len(),
        summary.failed.len(),
        summary.remaining
    );
    if summary.all_done() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Plan { config, out } => {
            let cfg = load_config(&config)?;
            let m = orchestrate::plan(&cfg, &out)?;
            println!("{} scenarios, {} pending, manifest in {}", m.len(), m.pending().len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            let cfg = load_config(&args.config)?;
            let summary = orchestrate::run(&cfg, &args.out, args.options()?)?;
            Ok(report_run(&summary))
        }
        Command::Resume(args) => {
            let cfg = load_config(&args.config)?;
            // Planning re-checks the stored config and rescans the records.
            let mut m = orchestrate::plan(&cfg, &args.out)?;
            println!("{} of {} scenarios pending", m.pending().len(), m.len());
            let summary = orchestrate::execute(&args.out, &mut m, args.options()?)?;
            Ok(report_run(&summary))
        }
        Command::Report { results, figure, out } => {
            let rows = orchestrate::load_results(&results)?;
            let files = report::write_figure(&rows, figure, &out)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { seed } => {
            let checks = verify::oracle_suite(seed);
            for c in &checks {
                println!("{c}");
            }
            Ok(if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Merge { results, out } => {
            let s = orchestrate::merge(&results, &out)?;
            for id in &s.skipped {
                eprintln!("skipped invalid record for scenario {id}");
            }
            println!("{} records, {} rows -> {}", s.records, s.rows, out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
