//! `solcurve`: sweeps a solution curve described by a TOML file and writes
//! CSV and SVG output.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 first grid point
//! unsolvable (partial CSV still written), 3 profile solve failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod solve;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};
use solve::{ProfileError, Status};

#[derive(Parser)]
#[command(
    name = "solcurve",
    version,
    about = "Global solution curves of nonlinear boundary-value problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the configured curve.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Write the SVG plot here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Solve at one value of the continuation parameter and print the profile.
    Profile {
        config: PathBuf,
        /// α, or ξ for harmonic problems.
        #[arg(long, allow_hyphen_values = true)]
        at: f64,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in nonlinearities.
    Catalog,
}

#[derive(Args)]
struct Common {
    /// Worker threads for independent grid points.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol_rel: Option<f64>,
    #[arg(long)]
    tol_abs: Option<f64>,
    /// Initial λ for Newton-based families.
    #[arg(long, allow_hyphen_values = true)]
    seed_lambda: Option<f64>,
    /// p-Laplace integration mode: `regularized` or `naive`.
    #[arg(long)]
    mode: Option<String>,
}

impl Common {
    fn overrides(&self, svg: Option<PathBuf>) -> Overrides {
        Overrides {
            jobs: self.jobs,
            tol_rel: self.tol_rel,
            tol_abs: self.tol_abs,
            seed_lambda: self.seed_lambda,
            mode: self.mode.clone(),
            csv: self.out.clone(),
            svg,
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(path: &Path, overrides: &Overrides) -> Result<u8> {
    let config = RunConfig::load(path, overrides)?;
    let sweep = solve::run_sweep(&config)?;
    emit(config.csv.as_deref(), &output::curve_csv(&sweep))?;
    if let Some(svg) = &config.svg {
        emit(Some(svg), &output::curve_svg(&sweep.curve))?;
    }
    match &sweep.status {
        Status::Complete => Ok(0),
        Status::FirstPointFailed(why) => {
            eprintln!("solcurve: first grid point failed: {why}");
            Ok(2)
        }
    }
}

fn profile(path: &Path, at: f64, overrides: &Overrides) -> Result<u8> {
    let config = RunConfig::load(path, overrides)?;
    match solve::profile(&config, at) {
        Ok(p) => {
            emit(config.csv.as_deref(), &output::profile_csv(&p))?;
            Ok(0)
        }
        Err(ProfileError::Solve(why)) => {
            eprintln!("solcurve: no solution at {at}: {why}");
            Ok(3)
        }
        Err(ProfileError::Other(e)) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, common, svg } => run(config, &common.overrides(svg.clone())),
        Command::Profile { config, at, common } => profile(config, *at, &common.overrides(None)),
        Command::Catalog => {
            for (name, formula) in solcurve::catalog_names() {
                println!("{name:<20} {formula}");
            }
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("solcurve: {e:#}");
            ExitCode::from(1)
        }
    }
}
