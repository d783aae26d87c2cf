//! `rigidlab <command> --config <path> [--out <dir>] [--threads N]`

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "rigidlab", version, about = "Periodic-orbit experiments for suspension flows over toral automorphisms")]
struct Args {
    /// One of enumerate, spectrum, cocycle, homoclinic, bowen, match, pigeonhole, verify.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(commands::COMMANDS))]
    command: String,
    /// Experiment config; optional for `verify`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global pool is built once");
    }
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None if args.command == "verify" => String::new(),
        None => {
            return Err(CliError::Config {
                line: 0,
                message: format!("`{}` needs --config", args.command),
            })
        }
    };
    let mut cfg = commands::resolve(&args.command, &text)?;
    let artifacts = commands::run(&mut cfg)?;
    artifacts.write(&args.out, &args.command)?;
    print!("{}", artifacts.stdout);
    if artifacts.failed > 0 {
        return Err(CliError::VerifyFailed(artifacts.failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rigidlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
