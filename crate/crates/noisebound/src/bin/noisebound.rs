//! Thin command-line front end; all logic lives in the library.

use clap::{Args, Parser, Subcommand, ValueEnum};
use noisebound::cli::{self, RunConfig};
use noisebound::exact::SolveMethod;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "noisebound",
    about = "Certify, solve, and verify noise tradeoffs in unit-birth regulatory networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the sufficient conditions and report the Lyapunov drift
    Check(CommonArgs),
    /// Solve the truncated chain and verify identities and inequalities
    Report(CommonArgs),
    /// Extract the signed graph and decide structural balance
    Balance(CommonArgs),
    /// Gillespie stationary estimates with batch-means error bars
    Simulate(CommonArgs),
    /// Run the order-preserving split coupling across seeds
    Couple(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Power,
    Direct,
}

#[derive(Args)]
struct CommonArgs {
    /// Network spec file(s) (JSON); may be given multiple times
    #[arg(long = "network", required = true)]
    networks: Vec<PathBuf>,

    /// Box caps M1,M2,... (default: auto-sized from a pilot run)
    #[arg(long = "box", value_delimiter = ',')]
    box_caps: Option<Vec<u32>>,

    /// Residual tolerance for the stationary solve
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,

    /// Stationary solver
    #[arg(long, value_enum, default_value = "power")]
    method: Method,

    /// Simulation horizon
    #[arg(long = "t-end", default_value_t = 10_000.0)]
    t_end: f64,

    /// Burn-in time (default: 20% of t-end)
    #[arg(long = "burn-in")]
    burn_in: Option<f64>,

    /// Batch count for batch-means error bars
    #[arg(long, default_value_t = 16)]
    batches: usize,

    /// Number of seeds / replicates
    #[arg(long, default_value_t = 100)]
    seeds: u64,

    /// Output directory for reports
    #[arg(long, default_value = "noisebound-out")]
    out: PathBuf,

    /// Run the report pipeline even when certification fails
    #[arg(long)]
    force: bool,

    /// Omit timestamps so reports are byte-stable
    #[arg(long = "no-timestamp")]
    no_timestamp: bool,

    /// Also dump the stationary distribution as CSV
    #[arg(long = "dump-pi")]
    dump_pi: bool,

    /// Also dump the truncated generator as row/col/value triplets
    #[arg(long = "dump-generator")]
    dump_generator: bool,

    /// Also dump one simulated trajectory as CSV (simulate only)
    #[arg(long = "dump-trajectory")]
    dump_trajectory: bool,
}

impl CommonArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            networks: self.networks,
            box_caps: self.box_caps,
            tol: self.tol,
            method: match self.method {
                Method::Power => SolveMethod::Power,
                Method::Direct => SolveMethod::Direct,
            },
            t_end: self.t_end,
            burn_in: self.burn_in,
            batches: self.batches,
            seeds: self.seeds,
            out_dir: self.out,
            force: self.force,
            no_timestamp: self.no_timestamp,
            dump_pi: self.dump_pi,
            dump_generator: self.dump_generator,
            dump_trajectory: self.dump_trajectory,
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("NOISEBOUND_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => cli::cmd_check(&args.into_config()),
        Command::Report(args) => cli::cmd_report(&args.into_config()),
        Command::Balance(args) => cli::cmd_balance(&args.into_config()),
        Command::Simulate(args) => cli::cmd_simulate(&args.into_config()),
        Command::Couple(args) => cli::cmd_couple(&args.into_config()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
