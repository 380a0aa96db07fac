//! `upslab`: transforms, set profiles, recovery and the randomized
//! experiments, driven from JSON files and flat JSON configs.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::config::Config;
use crate::error::{CliError, CliResult};

/// Environment variable overriding the dense grid cap.
pub const GRID_CAP_ENV: &str = "UPSLAB_GRID_CAP";

#[derive(Debug, Parser)]
#[command(name = "upslab", version, about = "Uncertainty principles and sparse recovery on Z_n^d")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat JSON file of defaults; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Primary output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Dra,
    Alphabet,
    #[value(alias = "enumeration")]
    #[serde(alias = "enumeration")]
    Enum,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forward or inverse transform of a signal file.
    Dft {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        direction: Option<Direction>,
    },
    /// Structure constants of a set file.
    ProfileSet { input: Option<PathBuf> },
    /// Recover a signal from a masked spectrum file.
    Recover {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Known sparsity; required for enumeration.
        #[arg(long)]
        sparsity: Option<usize>,
        /// Comma-separated increasing reals, for the alphabet method.
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        c_pq: Option<f64>,
        #[arg(long)]
        residual_tol: Option<f64>,
        /// Report file (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Fourier peaks of random sets against the high-probability bound.
    SampleSalem {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Additive energy of random sets and random subsets.
    EnergyStats {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        sigma_size: Option<usize>,
        #[arg(long)]
        u_size: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// DRA success rates over a grid of support and mask sizes.
    SweepDra {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Support sizes: `a:b`, `a:b:step` or `a,b,c`.
        #[arg(long)]
        e_sizes: Option<String>,
        /// Mask sizes, same syntax.
        #[arg(long)]
        s_sizes: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        /// Heatmap file; defaults to the CSV path with a `.pgm` extension.
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// Images of a planar set and of its spectrum magnitude.
    DemoFigure {
        input: Option<PathBuf>,
        /// Writes `<prefix>_set.pgm` and `<prefix>_spectrum.pgm`.
        #[arg(long)]
        prefix: Option<String>,
    },
}

fn grid_cap() -> CliResult<usize> {
    match std::env::var(GRID_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::bad_input(format!("{GRID_CAP_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(upslab_core::DEFAULT_GRID_CAP),
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let cfg = Config::load(cli.config.as_deref())?;
    let ctx = commands::Context {
        seed: cfg.pick(cli.seed, "seed")?,
        out: cfg.pick(cli.out, "out")?,
        cap: grid_cap()?,
        cfg,
    };
    match cli.command {
        Command::Dft { input, direction } => commands::dft(&ctx, input, direction),
        Command::ProfileSet { input } => commands::profile_set(&ctx, input),
        Command::Recover {
            input,
            method,
            sparsity,
            alphabet,
            p,
            c_pq,
            residual_tol,
            report,
        } => commands::recover(
            &ctx,
            commands::RecoverArgs {
                input,
                method,
                sparsity,
                alphabet,
                p,
                c_pq,
                residual_tol,
                report,
            },
        ),
        Command::SampleSalem { n, d, size, eps, trials } => commands::sample_salem(&ctx, n, d, size, eps, trials),
        Command::EnergyStats {
            n,
            d,
            sigma_size,
            u_size,
            trials,
        } => commands::energy_stats(&ctx, n, d, sigma_size, u_size, trials),
        Command::SweepDra {
            n,
            d,
            e_sizes,
            s_sizes,
            trials,
            pgm,
        } => commands::sweep_dra(&ctx, n, d, e_sizes, s_sizes, trials, pgm),
        Command::DemoFigure { input, prefix } => commands::demo_figure(&ctx, input, prefix),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
