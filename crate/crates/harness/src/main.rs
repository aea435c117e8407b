use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use olcb_harness::{init_thread_pool, run, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "olcb", version, about = "Orlicz-Lorentz centroid body experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Io {
    /// Experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Support values h(Gamma K, x) over the configured directions
    Norm(Io),
    /// Centroid bodies on direction grids with volume brackets
    Centroid(Io),
    /// Steiner symmetrals and S/T map checks
    Steiner(Io),
    /// Volume ratios of the corpus against the ball
    VerifyBp(Io),
    /// Sandwich, equivariance, Steiner inequality and inclusion campaigns
    VerifyLemmas(Io),
    /// Symmetrization traces with centroid volume brackets
    Converge(Io),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, io) = match cli.command {
        Cmd::Norm(io) => (Command::Norm, io),
        Cmd::Centroid(io) => (Command::Centroid, io),
        Cmd::Steiner(io) => (Command::Steiner, io),
        Cmd::VerifyBp(io) => (Command::VerifyBp, io),
        Cmd::VerifyLemmas(io) => (Command::VerifyLemmas, io),
        Cmd::Converge(io) => (Command::Converge, io),
    };
    let result = init_thread_pool()
        .and_then(|_| ExperimentConfig::load(&io.config))
        .and_then(|cfg| run(cmd, &cfg, &io.out));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.report);
            for r in outcome.failures().take(20) {
                eprintln!(
                    "FAIL {} {} {} slack={:.3e} tol={:.1e}{}",
                    r.body_id,
                    r.statistic,
                    r.case,
                    r.slack,
                    r.tolerance,
                    r.error.as_deref().map_or(String::new(), |e| format!(" error: {e}"))
                );
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("olcb {}: {e}", cmd.name());
            ExitCode::from(1)
        }
    }
}
