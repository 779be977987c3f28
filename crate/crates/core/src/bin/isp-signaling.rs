use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use isp_signaling::cli::{run, Command, RunOptions};

/// Equilibria, side-payment incentives, bargaining and welfare from a scenario file.
#[derive(Parser)]
#[command(version)]
struct Args {
    command: Cmd,
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// CSV output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Best-response iteration tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Solve,
    SweepPd,
    SweepGamma,
    Popb,
    Thresholds,
    Check,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Solve => Command::Solve,
            Cmd::SweepPd => Command::SweepPd,
            Cmd::SweepGamma => Command::SweepGamma,
            Cmd::Popb => Command::Popb,
            Cmd::Thresholds => Command::Thresholds,
            Cmd::Check => Command::Check,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = run(&RunOptions {
        command: args.command.into(),
        scenario: args.scenario,
        out: args.out,
        tol: args.tol,
    });
    ExitCode::from(code as u8)
}
