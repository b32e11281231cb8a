use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lcalim::runner::{run_file, Command, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
use lcalim::selftest;

#[derive(Parser)]
#[command(name = "lcalim", version, about = "Limit-theorem experiments on the circle, the p-adic integers and the p-adic solenoid")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for Monte Carlo streams (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Fourier transforms, condition sequences and verdicts.
    Verify(RunArgs),
    /// Monte Carlo cross-check against the exact engine.
    Sample(RunArgs),
    /// Condition sequences only.
    Conditions(RunArgs),
    /// Runs the built-in acceptance suite.
    Selftest {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("LCALIM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("LCALIM_THREADS: expected a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("LCALIM_THREADS: expected a positive integer, got 0".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("LCALIM_THREADS: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let (command, args) = match cli.command {
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Sample(a) => (Command::Sample, a),
        Cmd::Conditions(a) => (Command::Conditions, a),
        Cmd::Selftest { .. } => {
            let mut ok = true;
            for o in selftest::run_all() {
                println!("{o}");
                ok &= o.passed;
            }
            return ExitCode::from(if ok { EXIT_PASS } else { EXIT_FAIL } as u8);
        }
    };
    match run_file(&args.config, command, args.out.as_deref(), args.seed) {
        Ok(summary) => {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            let overall = summary.verdict.get("overall").cloned().unwrap_or_default();
            println!("overall: {overall}");
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
