//! Thin CLI over the library runner.
//!
//! Exit codes: 0 success/pass, 1 verify fail, 2 config error, 3 runtime
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use quadshift::error::Error;
use quadshift::runner;
use quadshift::scenario::Scenario;

#[derive(Parser)]
#[command(name = "quadshift", version, about = "1D quadratic-Hamiltonian dynamics and linear-term shift verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a scenario; write series.csv, snapshots, summary.json
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare direct evolution with the transform of the reduced evolution
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Debug: add this action to the phase accumulator beta
        #[arg(long)]
        corrupt_beta: Option<f64>,
    },
    /// Rerun verify halving dt per level; report observed order
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run patched copies of a template scenario concurrently
    Sweep {
        /// Template scenario config
        #[arg(long)]
        config: PathBuf,
        /// JSON list of {name, patch} entries
        #[arg(long)]
        overrides: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run { config, out } => {
            let scenario = Scenario::from_path(&config)?;
            let summary = runner::run(&scenario, &out)?;
            let f = summary.final_record;
            println!(
                "run complete: t = {:.6}, norm = {:.12}, <x> = {:.6e}, var_x = {:.6e}",
                f.t, f.norm, f.mean_x, f.var_x
            );
            println!("artifacts in {}", out.display());
            Ok(0)
        }
        Command::Verify { config, out, corrupt_beta } => {
            let scenario = Scenario::from_path(&config)?;
            let report = runner::verify(&scenario, &out, corrupt_beta)?;
            if let Some(r) = report.max_position_residual {
                println!("max position residual: {r:.6e}");
            }
            if let Some(r) = report.max_momentum_residual {
                println!("max momentum residual: {r:.6e}");
            }
            println!("max moment delta:      {:.6e}", report.max_moment_delta);
            println!("max norm drift:        {:.6e}", report.max_norm_drift);
            println!("{}", if report.pass { "PASS" } else { "FAIL" });
            println!("report in {}", out.join("verify.json").display());
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Convergence { config, levels, out } => {
            let scenario = Scenario::from_path(&config)?;
            let rows = runner::convergence(&scenario, levels, &out)?;
            println!("level  dt            residual      order");
            for r in &rows {
                println!("{:<6} {:<13.6e} {:<13.6e} {}", r.level, r.dt, r.residual, r.order);
            }
            println!("table in {}", out.join("convergence.csv").display());
            Ok(0)
        }
        Command::Sweep { config, overrides, out } => {
            let manifest = runner::sweep(&config, &overrides, &out)?;
            let ok = manifest.entries.iter().filter(|e| e.status == "ok").count();
            println!("{ok}/{} scenarios succeeded", manifest.entries.len());
            println!("manifest in {}", out.join("manifest.json").display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
