use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use schedcomm::qsim::SimConfig;
use schedcomm::scenario::{
    cmd_codelen, cmd_exponent, cmd_region, cmd_simulate, cmd_sweep, Scenario,
};
use schedcomm::{Error, Result};

/// Error exponents, codeword lengths, stability regions and queue
/// simulation for scheduled multiaccess and broadcast transmission.
#[derive(Parser)]
#[command(name = "schedcomm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error exponents and service quanta.
    Exponent(Common),
    /// Service requirements and minimal codeword lengths.
    Codelen(Common),
    /// Membership of the scenario's EA in the stability region.
    Region(Common),
    /// Simulate the queueing system.
    Simulate(SimArgs),
    /// Stability thresholds along the scenario's sweep axis, as CSV.
    Sweep(SimArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    replications: usize,
    #[arg(long, default_value_t = 200_000)]
    horizon: u64,
    /// Also write the first replication's time series as CSV.
    #[arg(long)]
    series: Option<PathBuf>,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            horizon: self.horizon,
            replications: self.replications,
            seed: self.seed,
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let load = |c: &Common| Scenario::load(&c.scenario);
    match cli.command {
        Command::Exponent(c) => emit(&c.out, &cmd_exponent(&load(&c)?)?),
        Command::Codelen(c) => emit(&c.out, &cmd_codelen(&load(&c)?)?),
        Command::Region(c) => emit(&c.out, &cmd_region(&load(&c)?)?),
        Command::Simulate(a) => {
            let out = cmd_simulate(&load(&a.common)?, &a.config())?;
            if let Some(p) = &a.series {
                let first = out
                    .report
                    .replications
                    .first()
                    .ok_or_else(|| Error::Config("no replication ran".into()))?;
                std::fs::write(p, first.series_csv()?)?;
            }
            emit(&a.common.out, &out.json)
        }
        Command::Sweep(a) => emit(&a.common.out, &cmd_sweep(&load(&a.common)?, &a.config())?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
