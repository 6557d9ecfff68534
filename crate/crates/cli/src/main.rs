// SPDX-License-Identifier: Apache-2.0

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "kitaev-qse", version, about = "VQE, subspace expansion and Green's functions on the Kitaev honeycomb model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// VQE seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Train the ansatz over a depth sweep and write the reference state.
    Vqe,
    /// Energy-distance tables from the reference state.
    Qse,
    /// Retarded Green's functions with an ED column.
    Greens,
    /// Dynamical structure factor tables (QSE and ED).
    Dsf,
    /// Exact ground-state energies for the configured lattice.
    EdReference,
    /// Every stage in order.
    All,
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.output = out;
    }
    if let Some(seed) = cli.seed {
        cfg.vqe.seed = seed;
    }
    cfg.validate()?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let files = match cli.command {
        Command::Vqe => commands::cmd_vqe(&cfg)?,
        Command::Qse => commands::cmd_qse(&cfg)?,
        Command::Greens => commands::cmd_greens(&cfg)?,
        Command::Dsf => commands::cmd_dsf(&cfg)?,
        Command::EdReference => commands::cmd_ed_reference(&cfg)?,
        Command::All => commands::cmd_all(&cfg)?,
    };
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
