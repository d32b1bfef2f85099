use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod output;

use cskpa_core::Error;

#[derive(Parser)]
#[command(
    name = "cskpa",
    version,
    about = "Known-plaintext attack workbench for compressed-sensing encryption"
)]
struct Cli {
    /// Directory for CSV and summary JSON; CSV goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a plaintext with an LFSR-expanded antipodal matrix.
    Encode(commands::EncodeArgs),
    /// Recover an LFSR from its output with Berlekamp-Massey.
    KeystreamAttack(commands::KeystreamArgs),
    /// Reduce a known pair row to a subset-sum instance (JSON).
    Reduce(commands::ReduceArgs),
    /// Count solutions of an instance exactly.
    Count(commands::InstanceArgs),
    /// Enumerate solutions of an instance as bit strings.
    Enumerate(commands::EnumerateArgs),
    /// Expected solution counts and key lifetimes.
    Predict(commands::PredictArgs),
    /// Rational coefficients of the balanced-configuration polynomials.
    PhTable(commands::PhTableArgs),
    /// Full attack/verify experiment.
    Attack(commands::AttackArgs),
    /// Second-class recovery quality against flip density.
    EtaSweep(commands::EtaSweepArgs),
    /// Eavesdropper counts against the prediction, per n.
    Fig2(commands::Fig2Args),
    /// Eavesdropper counts per Hamming distance against the prediction.
    Fig3(commands::Fig3Args),
    /// Class-upgrade counts against the prediction, per n.
    Fig5(commands::Fig5Args),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Schema(_) | Error::Json(_) => 2,
        Error::BudgetExceeded(_) | Error::Exhausted { .. } | Error::PeriodExhausted { .. } => 3,
        Error::Io(_) | Error::Csv(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = output::Output::new(cli.out);
    let result = match cli.command {
        Command::Encode(a) => commands::encode(&a, &out),
        Command::KeystreamAttack(a) => commands::keystream_attack(&a, &out),
        Command::Reduce(a) => commands::reduce(&a, &out),
        Command::Count(a) => commands::count(&a, &out),
        Command::Enumerate(a) => commands::enumerate(&a, &out),
        Command::Predict(a) => commands::predict(&a, &out),
        Command::PhTable(a) => commands::ph_table(&a, &out),
        Command::Attack(a) => commands::attack(&a, &out),
        Command::EtaSweep(a) => commands::eta_sweep(&a, &out),
        Command::Fig2(a) => commands::fig2(&a, &out),
        Command::Fig3(a) => commands::fig3(&a, &out),
        Command::Fig5(a) => commands::fig5(&a, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
