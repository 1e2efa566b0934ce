//! `dpscan`: detect, evaluate, generate training data, annotate.

mod annotate;
mod detect;
mod evaluate;
mod generate;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "dpscan", version, about = "Dark pattern detection for UI screenshots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect dark patterns on one screenshot and print a findings document.
    Detect(detect::Args),
    /// Score a labelled dataset and print a report.
    Evaluate(evaluate::Args),
    /// Composite icon templates onto backgrounds to build a training set.
    Generate(generate::Args),
    /// Write the built-in icon templates and procedural UI backgrounds.
    Assets(generate::AssetArgs),
    /// Draw findings onto a copy of the screenshot.
    Annotate(annotate::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(a) => detect::run(a),
        Command::Evaluate(a) => evaluate::run(a),
        Command::Generate(a) => generate::run(a),
        Command::Assets(a) => generate::run_assets(a),
        Command::Annotate(a) => annotate::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
