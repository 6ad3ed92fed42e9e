//! `twocentre`: phase portraits, averaging checks, verification suites and
//! the three-body experiment as CSV/JSON files.

mod checks;
mod config;
mod flows;
mod output;
mod portrait;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::resolve;

#[derive(Parser, Debug)]
#[command(version, about = "Two-centre problem and three-body experiment")]
struct Cli {
    /// JSON file with the subcommand's options; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Level curves of the normalized E₀ with separatrices and critical points.
    Portrait(portrait::PortraitArgs),
    /// The separatrices S0 and S1 only.
    Separatrix(portrait::SeparatrixArgs),
    /// Closed-form motion on the collision level.
    CollisionOrbit(flows::CollisionArgs),
    /// Periods of the leading flow and the action-angle image of its levels.
    ActionAngle(flows::ActionAngleArgs),
    /// The ℓ-averaged potential at one point and its one-dimensional normal form.
    Average(checks::AverageArgs),
    /// Invariant suites; exits nonzero when any check fails.
    Verify(checks::VerifyArgs),
    /// Integrates the two-centre flow in K-coordinates.
    #[command(name = "integrate-2c")]
    IntegrateTwoCentre(flows::TwoCentreArgs),
    /// The planar equal-mass three-body run.
    Experiment(flows::ExperimentArgs),
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("EULER_LIB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("EULER_LIB_THREADS = '{v}' is not a count"))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring the thread pool")?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_threads()?;
    let cfg = cli.config.as_deref();
    let ok = |b: bool| {
        if b {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    };
    Ok(match cli.command {
        Command::Portrait(a) => {
            let failed = portrait::portrait(&resolve(&a, cfg)?)?;
            ok(failed == 0)
        }
        Command::Separatrix(a) => {
            portrait::separatrix(&resolve(&a, cfg)?)?;
            ExitCode::SUCCESS
        }
        Command::CollisionOrbit(a) => {
            flows::collision(&resolve(&a, cfg)?)?;
            ExitCode::SUCCESS
        }
        Command::ActionAngle(a) => {
            flows::action_angle(&resolve(&a, cfg)?)?;
            ExitCode::SUCCESS
        }
        Command::Average(a) => {
            checks::average(&resolve(&a, cfg)?)?;
            ExitCode::SUCCESS
        }
        Command::Verify(a) => ok(checks::verify(&resolve(&a, cfg)?)?),
        Command::IntegrateTwoCentre(a) => ok(flows::two_centre(&resolve(&a, cfg)?)?),
        Command::Experiment(a) => ok(flows::experiment(&resolve(&a, cfg)?)?),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
