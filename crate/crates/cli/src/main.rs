//! Command-line entry point: seeded runs of every pipeline, CSV/JSON
//! emission, and table comparison reports.
//!
//! Configuration comes from an optional TOML file plus flag overrides;
//! flags win. All floating-point output is serialised with 17 significant
//! digits so files round-trip exactly.

mod config;
mod jsonfmt;
mod run;

use clap::{Parser, Subcommand};

use config::{Cli, Overrides};

#[derive(Parser)]
#[command(name = "gaussqpipe", version, about = "correlated-Gaussian quantum pipeline simulator")]
struct Args {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<String>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prepare |x> or |y> and estimate its norm; writes a JSON record.
    Sample,
    /// Exponentiated rBergomi variance/volatility state (Algorithm 1).
    Exp,
    /// Discrete-sum QAE for the integrated variance (Algorithm 2).
    QaeSum,
    /// Norm estimation via QAE only.
    EstimateNorm,
    /// Covariance characteristics sweep: writes scaling.csv and fits.csv.
    Scaling,
    /// Re-read scaling.csv and re-fit: writes fits.csv.
    Report,
}

fn main() {
    let args = Args::parse();
    if let Ok(threads) = std::env::var("GAUSSQPIPE_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    let cli = match Cli::assemble(args.config.as_deref(), &args.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            std::process::exit(2);
        }
    };
    let outcome = match args.command {
        Command::Sample => run::cmd_sample(&cli),
        Command::Exp => run::cmd_exp(&cli),
        Command::QaeSum => run::cmd_qae_sum(&cli),
        Command::EstimateNorm => run::cmd_estimate_norm(&cli),
        Command::Scaling => run::cmd_scaling(&cli),
        Command::Report => run::cmd_report(&cli),
    };
    match outcome {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
