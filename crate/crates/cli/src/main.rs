//! `urysohn-ifs`: batch front end. Reads one JSON config, runs one
//! subcommand, writes its report to stdout and its files under `--out`.
//!
//! Exit status: 0 success, 1 validation failure, 2 non-convergence,
//! 3 malformed input. The error name goes to stderr.

mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Output;
use crate::config::{Overrides, RunConfig};
use crate::error::{CliError, Exit};

#[derive(Parser, Debug)]
#[command(
    name = "urysohn-ifs",
    version,
    about = "Attractors, Wasserstein lifts and Katetov extensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for emitted files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Tolerance literal, e.g. `1e-3` or `1/1000`.
    #[arg(long, global = true)]
    tol: Option<String>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Check the metric axioms of the configured space.
    Validate,
    /// Banach/Rakotch/Matkowski verdicts for a modulus.
    Classify,
    /// Iterate the Hutchinson operator to tolerance.
    Attractor,
    /// Sample the attractor by random map choices.
    Chaos,
    /// Exact Wasserstein-1 distance and optimal plan.
    Wasserstein,
    /// Contraction transfer to measures over random pairs.
    LiftCheck,
    /// Extend a partial map with a continuity modulus.
    Extend,
    /// Grow an ambient, extend a self-similar system into it and iterate.
    Realize,
    /// Grow a finite approximation of the Urysohn space.
    Urysohn,
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::missing("--config"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let overrides = Overrides {
        tol: cli.tol.clone(),
        max_iter: cli.max_iter,
        seed: cli.seed,
        trials: cli.trials,
    };
    let cfg = RunConfig::parse(&text, &overrides)?;
    match cli.command {
        Command::Validate => commands::validate(&cfg),
        Command::Classify => commands::classify(&cfg),
        Command::Attractor => commands::attractor(&cfg),
        Command::Chaos => commands::chaos(&cfg),
        Command::Wasserstein => commands::wasserstein(&cfg),
        Command::LiftCheck => commands::lift_check(&cfg),
        Command::Extend => commands::extend(&cfg),
        Command::Realize => commands::realize(&cfg),
        Command::Urysohn => commands::urysohn(&cfg),
    }
}

fn emit(out: &Output, dir: &Path) -> Result<(), CliError> {
    if !out.files.is_empty() {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    }
    for (name, contents) in &out.files {
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    }
    print!("{}", out.stdout);
    Ok(())
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(Exit::Malformed as u8);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&out, &cli.out) {
                return fail(&e);
            }
            match commands::exit_of(&out) {
                Exit::Ok => ExitCode::SUCCESS,
                _ => fail(out.failure.as_ref().expect("failure carries the exit")),
            }
        }
        Err(e) => fail(&e),
    }
}
