//! Thin command-line front end; all logic lives in the library harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mublab::harness::{
    cmd_mub_verify, cmd_qaoa_bench, cmd_qrao_bench, cmd_report, cmd_width, ExperimentConfig,
    WidthSub,
};

#[derive(Parser)]
#[command(name = "mublab", version, about = "MUB width and warm-start laboratory")]
struct Cli {
    /// JSON configuration file; omitted fields take the documented defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Parallel worker count override.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Run the paper-scale grid instead of the desk-scale default.
    #[arg(long, global = true)]
    full: bool,

    /// Add the exhaustive family oracle to QRAO runs.
    #[arg(long, global = true)]
    exhaustive: bool,

    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify all supported MUB systems; export them as JSON.
    MubVerify,
    /// Gaussian-width sweeps: compare, dominance, octahedron, radial, gap.
    Width {
        #[arg(value_parser = ["compare", "dominance", "octahedron", "radial", "gap"])]
        sub: String,
    },
    /// Standard vs adaptive MUB-XRot QAOA over the benchmark grid.
    QaoaBench,
    /// QRAO MaxCut family-search strategies over the benchmark grid.
    QraoBench,
    /// Recompute summaries and plot CSVs from raw result files.
    Report,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, mublab::Error> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(workers) = cli.workers {
        config.workers = workers;
    }
    if cli.full {
        config.full = true;
    }
    if cli.exhaustive {
        config.exhaustive = true;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.display().to_string();
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<bool, mublab::Error> {
    match &cli.command {
        Command::MubVerify => {
            let config = load_config(&cli)?;
            let out = cmd_mub_verify(&config)?;
            for sys in &out.systems {
                println!(
                    "[{}] {} (overlap dev {:.2e}, orthonormality dev {:.2e})",
                    if sys["pass"].as_bool().unwrap_or(false) {
                        "PASS"
                    } else {
                        "FAIL"
                    },
                    sys["system"].as_str().unwrap_or("?"),
                    sys["max_overlap_deviation"].as_f64().unwrap_or(f64::NAN),
                    sys["max_orthonormality_deviation"]
                        .as_f64()
                        .unwrap_or(f64::NAN),
                );
            }
            println!("report: {}", out.report_path);
            Ok(out.pass)
        }
        Command::Width { sub } => {
            let config = load_config(&cli)?;
            let sub = WidthSub::parse(sub)?;
            let (pass, report) = cmd_width(sub, &config)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(pass)
        }
        Command::QaoaBench => {
            let config = load_config(&cli)?;
            let out = cmd_qaoa_bench(&config)?;
            println!(
                "paired cases: {}  W/T/L: {}/{}/{}  mean Δ decoded: {:+.4}  non-worse: {:.1}%",
                out.comparison.n_cases,
                out.comparison.wins,
                out.comparison.ties,
                out.comparison.losses,
                out.comparison.mean_delta,
                100.0 * out.comparison.non_worse_rate,
            );
            println!("results: {}", out.results_path);
            println!("summary: {}", out.summary_path);
            Ok(true)
        }
        Command::QraoBench => {
            let config = load_config(&cli)?;
            let out = cmd_qrao_bench(&config)?;
            println!(
                "cells: {}  bitflip-vs-X W/T/L: {}/{}/{}  mean Δα_r: {:+.4}",
                out.cells, out.wins, out.ties, out.losses, out.mean_delta_vs_x,
            );
            println!("results: {}", out.results_path);
            println!("summary: {}", out.summary_path);
            Ok(true)
        }
        Command::Report => {
            let dir = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(ExperimentConfig::default().out_dir));
            let report = cmd_report(&dir)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
