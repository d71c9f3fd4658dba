use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use trend_intervene::{load_entries, run_batch, BatchConfig};
use trend_intervene_core::series::parse_gt_csv;

#[derive(Parser)]
#[command(name = "trend-intervene", version, about = "Judge whether monthly awareness events raise search interest")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis for every entry of a config file.
    Analyze {
        /// CSV with header csv_path,event_month,label.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also write an SVG line plot per entry.
        #[arg(long)]
        svg: bool,
    },
    /// Validate a single Google Trends CSV export.
    Check { csv: PathBuf },
}

fn analyze(config: PathBuf, alpha: f64, out: PathBuf, seed: u64, jobs: usize, svg: bool) -> Result<ExitCode> {
    let entries = load_entries(&config)?;
    let config = BatchConfig {
        entries,
        alpha,
        output_dir: out,
        seed,
        jobs,
        svg,
    };
    let summary = run_batch(&config)?;
    for c in &summary.classifications {
        println!("{}: {}", c.query_name, c.conclusion);
    }
    for (label, message) in &summary.failures {
        eprintln!("{label}: failed: {message}");
    }
    println!("report written to {}", summary.report_path.display());
    Ok(if summary.all_classified() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn check(path: PathBuf) -> Result<ExitCode> {
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let series = parse_gt_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
    println!("query:  {}", series.query_name);
    if let Some(region) = &series.region {
        println!("region: {region}");
    }
    println!("span:   {} to {} ({} months)", series.start, series.end(), series.len());
    let zeros = series.values.iter().filter(|&&v| v == 0.0).count();
    if zeros > 0 {
        println!("zeros:  {zeros}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            config,
            alpha,
            out,
            seed,
            jobs,
            svg,
        } => analyze(config, alpha, out, seed, jobs, svg),
        Command::Check { csv } => check(csv),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
