use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rieszflow::{dispatch, exit, parse_config, LabError, Subcommand};

/// Damped σ-evolution experiments: decay rates, admissibility and oracles.
#[derive(Debug, Parser)]
#[command(
    name = "rieszflow",
    version,
    after_help = "Exit status: 0 ok, 1 internal error or failed oracle, 2 invalid config, 3 growth detected.\n\
                  Overrides take the form --key=value, e.g. --p=4 --N=4096 --emit=csv,json."
)]
struct Cli {
    /// linear | semilinear | admissible | sweep | oracle-test (defaults to the config's `subcommand`)
    subcommand: Option<String>,

    /// Flat TOML config file
    #[arg(long, short)]
    config: Option<PathBuf>,

    /// Config overrides as --key=value (may appear anywhere)
    #[arg(skip)]
    overrides: Vec<String>,
}

/// Splits `--key=value` overrides from the arguments clap parses.
fn split_overrides(args: impl Iterator<Item = String>) -> (Vec<String>, Vec<String>) {
    args.partition(|a| {
        a.strip_prefix("--")
            .and_then(|body| body.split_once('='))
            .is_none_or(|(key, _)| key == "config")
    })
}

fn run(cli: &Cli) -> Result<i32, LabError> {
    let subcommand = cli
        .subcommand
        .as_deref()
        .map(str::parse::<Subcommand>)
        .transpose()?;
    let config = parse_config(subcommand, cli.config.as_deref(), &cli.overrides)?;
    let summary = dispatch(&config)?;
    eprintln!(
        "{}: {} files in {} (config {})",
        config.subcommand,
        summary.outputs.files.len(),
        config.output_dir.display(),
        &summary.config_hash[..12]
    );
    Ok(summary.exit_code)
}

fn main() -> ExitCode {
    let (args, overrides) = split_overrides(std::env::args());
    let mut cli = Cli::parse_from(args);
    cli.overrides = overrides;
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    debug_assert!((exit::SUCCESS..=exit::GROWTH_DETECTED).contains(&code));
    ExitCode::from(code as u8)
}
