//! `prbox` command-line front end.

mod box_cmd;
mod localpart_cmd;
mod output;
mod verify_cmd;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prbox::strategies::games::DEFAULT_SEED;

#[derive(Parser)]
#[command(name = "prbox", version, about = "Exact local parts of noisy PR boxes")]
struct Cli {
    /// Worker threads for pricing and sweeps (defaults to all cores).
    #[arg(long, global = true, env = "PRBOX_THREADS")]
    threads: Option<usize>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, check, combine and export boxes.
    #[command(subcommand)]
    Box(box_cmd::BoxCmd),
    /// Solve, bound and sweep local parts.
    #[command(subcommand)]
    Localpart(localpart_cmd::LocalpartCmd),
    /// Run a verification suite.
    #[command(subcommand)]
    Verify(verify_cmd::VerifyCmd),
    /// Local parts of the mixed tensor words S_{n,k}.
    Snk(localpart_cmd::SnkArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    log::info!("seed {:#x}, {} worker threads", cli.seed, rayon::current_num_threads());
    let result = match cli.command {
        Command::Box(cmd) => box_cmd::run(cmd),
        Command::Localpart(cmd) => localpart_cmd::run(cmd),
        Command::Verify(cmd) => verify_cmd::run(cmd, cli.seed),
        Command::Snk(args) => localpart_cmd::run_snk(args),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
