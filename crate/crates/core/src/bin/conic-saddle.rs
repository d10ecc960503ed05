use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conic_saddle::config::RunConfig;
use conic_saddle::diagnostics::ClusterParams;
use conic_saddle::runner;
use conic_saddle::Result;

#[derive(Parser)]
#[command(name = "conic-saddle", version, about = "Conic particle solvers for mixed Nash equilibria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured trajectory; writes the JSONL records and the final checkpoint.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `solver.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster a checkpoint into a reference equilibrium file.
    EstimateMne {
        checkpoint: PathBuf,
        #[arg(long, default_value_t = ClusterParams::DEFAULT_WEIGHT_FLOOR)]
        weight_floor: f64,
        /// Defaults to a per-player gap heuristic.
        #[arg(long)]
        merge_radius: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance between one mirror-prox step and the proximal-point step over a sweep of step sizes.
    CompareMpPp {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated step sizes (default `compare.etas`).
        #[arg(long, value_delimiter = ',')]
        etas: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV path (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract `k,ni` from a trajectory.
    NiCurve {
        jsonl: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract `k,v_total` from a trajectory.
    LyapunovCurve {
        jsonl: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let cfg = RunConfig::load(&config)?;
            let (output, files) = runner::run(&cfg, seed, out.as_deref())?;
            for w in &output.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "{} records -> {}, final state -> {}",
                output.records.len(),
                files.trajectory.display(),
                files.checkpoint.display()
            );
        }
        Command::EstimateMne { checkpoint, weight_floor, merge_radius, out } => {
            let r = runner::estimate_mne(&checkpoint, weight_floor, merge_radius, &out)?;
            eprintln!("{} + {} atoms -> {}", r.mu.len(), r.nu.len(), out.display());
        }
        Command::CompareMpPp { config, etas, seed, out } => {
            let cfg = RunConfig::load(&config)?;
            let etas = etas.unwrap_or_else(|| cfg.compare.etas.clone());
            let sweep = runner::compare_sweep(&cfg, &etas, seed)?;
            match out {
                Some(path) => runner::write_sweep_csv(&sweep, &path)?,
                None => print!("{}", runner::sweep_csv(&sweep)),
            }
        }
        Command::NiCurve { jsonl, out } => {
            runner::write_curve_csv(&jsonl, "ni", &out)?;
        }
        Command::LyapunovCurve { jsonl, out } => {
            runner::write_curve_csv(&jsonl, "v_total", &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(runner::exit_code(&e) as u8)
        }
    }
}
