//! `cdseq`: design, evaluate and benchmark low-sidelobe phase codes.

mod bench;
mod design;
mod error;
mod evaluate;
mod manifest;
mod options;
mod pareto;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "cdseq", version, about, after_help = options::DB_NOTE)]
struct Cli {
    /// Worker threads for parallel starts and grid cells.
    #[arg(long, global = true, env = "CDSEQ_THREADS")]
    threads: Option<usize>,

    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multi-start coordinate descent for one Pareto weight.
    Design(design::DesignArgs),
    /// Print N, PSL and ISL of a sequence file.
    Evaluate(evaluate::EvaluateArgs),
    /// Warm-started sweep over decreasing Pareto weights.
    Pareto(pareto::ParetoArgs),
    /// Best-of-R runs over a grid of lengths and alphabets.
    Bench(bench::BenchArgs),
}

fn init(cli: &Cli) -> CliResult<()> {
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {t} threads: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init(&cli).and_then(|()| match &cli.command {
        Command::Design(a) => design::run(a),
        Command::Evaluate(a) => evaluate::run(a),
        Command::Pareto(a) => pareto::run(a),
        Command::Bench(a) => bench::run(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cdseq: {e}");
            e.exit_code()
        }
    }
}
