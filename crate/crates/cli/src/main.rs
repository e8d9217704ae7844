//! Experiment runner for the random unitary band-matrix library: seeded,
//! reproducible runs emitting plot-ready CSV and JSON summaries.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure,
//! 4 self-test failure.

mod commands;
mod config;
mod selftest;

use clap::{Parser, Subcommand};
use commands::*;
use ubm::Error;

#[derive(Parser)]
#[command(
    name = "ubm",
    version,
    about = "Random unitary five-diagonal band matrices: density of states, Lyapunov exponents, \
             Thouless formula, spectral support and path combinatorics"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pooled eigenphase histogram / density-of-states estimate
    Dos(DosArgs),
    /// Cocycle Lyapunov exponents over a quasi-energy grid
    Lyapunov(LyapunovArgs),
    /// Compare cocycle growth with the Thouless right-hand side
    #[command(name = "thouless-scan")]
    ThoulessScan(ThoulessArgs),
    /// Closed forms of the free operator (density, N0, gamma0)
    #[command(name = "free-exact")]
    FreeExact(FreeExactArgs),
    /// Weighted lattice-path sums and their asymptotics
    Paths(PathsArgs),
    /// Pooled spectra against the predicted support arcs
    #[command(name = "support-check")]
    SupportCheck(SupportArgs),
    /// Analyticity criterion margin, thresholds and moment bounds
    Analyticity(AnalyticityArgs),
    /// Fast subset of the verification suite
    Selftest {
        /// Inject a deliberate fault to exercise a check (e.g. det-sign)
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();

    if let Some(threads) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure worker pool: {e}");
            std::process::exit(2);
        }
    }

    let result = match &cli.command {
        Command::Dos(args) => run_dos(&cli.common, args),
        Command::Lyapunov(args) => run_lyapunov(&cli.common, args),
        Command::ThoulessScan(args) => run_thouless(&cli.common, args),
        Command::FreeExact(args) => run_free_exact(&cli.common, args),
        Command::Paths(args) => run_paths(&cli.common, args),
        Command::SupportCheck(args) => run_support(&cli.common, args),
        Command::Analyticity(args) => run_analyticity(&cli.common, args),
        Command::Selftest { inject_fault } => {
            let fault = match inject_fault.as_deref() {
                None => selftest::Fault::None,
                Some("det-sign") => selftest::Fault::DetSign,
                Some(other) => {
                    eprintln!("error: unknown fault '{other}'");
                    std::process::exit(2);
                }
            };
            if selftest::run(fault) {
                return;
            }
            std::process::exit(4);
        }
    };

    match result {
        Ok(()) => {}
        Err(e @ Error::Config(_)) | Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(3);
        }
    }
}
