//! `vie`: parse, polynomialize and solve Volterra integral equations.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Common, CompareArgs, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "vie",
    version,
    about = "Power-series Picard solver for separable Volterra equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the equation and report its separable structure.
    Check(Common),
    /// Show the auxiliary variables and the polynomial system.
    ShowSystem(Common),
    /// Run the Picard iteration and print the series for y.
    Solve(Common),
    /// Compare the series with a closed form and/or the trapezoid solver.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: CompareArgs,
    },
    /// Print the remaining residual of every component after solving.
    Residual(Common),
}

fn execute(cli: &Cli) -> Result<(String, Option<std::path::PathBuf>), CliError> {
    let common = match &cli.command {
        Command::Check(c) | Command::ShowSystem(c) | Command::Solve(c) | Command::Residual(c) => c,
        Command::Compare { common, .. } => common,
    };
    let loaded = RunConfig::load(common)?;
    let text = match &cli.command {
        Command::Check(_) => commands::check(&loaded)?,
        Command::ShowSystem(_) => commands::show_system(&loaded)?,
        Command::Solve(_) => commands::solve(&loaded)?,
        Command::Compare { args, .. } => commands::compare(&loaded, args)?,
        Command::Residual(_) => commands::residual(&loaded)?,
    };
    Ok((text, loaded.config.out.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|(text, out)| match out {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
