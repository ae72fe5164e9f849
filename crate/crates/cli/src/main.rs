//! Command-line driver: graph generation, de Bruijn embedding, derandomized
//! repetition experiments, direct-product test experiments, the decoding
//! pipeline, and the verification suite. Every randomized command takes an
//! explicit seed and emits reports that embed a reproducible run manifest.

mod commands;
mod manifest;
mod schema;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

/// Exit codes: 0 ok, 1 usage, 2 precondition, 3 budget, 4 verification
/// failure.
#[derive(Parser)]
#[command(name = "pcp-forge", version, about = "Constraint-graph transformation and experiment toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a constraint graph file (with an optional planted assignment sidecar).
    Gen(commands::gen::GenArgs),
    /// Generate a random satisfiable circuit file.
    GenCircuit(commands::gen::GenCircuitArgs),
    /// Embed a constraint graph onto a de Bruijn graph.
    Embed(commands::embed::EmbedArgs),
    /// Run direct-product test experiments (p, s, p2).
    Dp(commands::dp::DpArgs),
    /// Derandomized-repetition experiments over a linear-structure graph.
    Derand(commands::derand::DerandArgs),
    /// Run the decoding pipeline on a circuit and exercise the decoder.
    DecodePipeline(commands::decode::DecodeArgs),
    /// Run the full invariant suite; exits nonzero on any failure.
    Verify(commands::verify::VerifyArgs),
}

fn main() -> ExitCode {
    // usage errors exit with 1; clap's default of 2 is reserved for
    // precondition failures here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let is_help = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let result = match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::GenCircuit(args) => commands::gen::run_circuit(args),
        Command::Embed(args) => commands::embed::run(args),
        Command::Dp(args) => commands::dp::run(args),
        Command::Derand(args) => commands::derand::run(args),
        Command::DecodePipeline(args) => commands::decode::run(args),
        Command::Verify(args) => commands::verify::run(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            // single-line, machine-parseable error
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> ExitCode {
    if let Some(core_err) = err.downcast_ref::<pcp_forge_core::Error>() {
        use pcp_forge_core::Error as E;
        return match core_err {
            E::BudgetExceeded { .. } => ExitCode::from(3),
            E::Precondition(_)
            | E::RetryCapExceeded { .. }
            | E::NotRegular { .. }
            | E::NotBijection(_)
            | E::DimensionMismatch { .. }
            | E::AmbientMismatch
            | E::UnsupportedField(_)
            | E::EmptyIndexClass(_)
            | E::UnsatisfiableCircuit => ExitCode::from(2),
            _ => ExitCode::from(1),
        };
    }
    ExitCode::from(1)
}
