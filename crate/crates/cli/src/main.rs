use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcx_cli::{config, run_command, Command, Options};

#[derive(Parser)]
#[command(
    name = "qcx",
    version,
    about = "Convexity index, decomposable-sum and risk-measure checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Cross-check sum verdicts with the product-grid oracle.
    #[arg(long)]
    brute: bool,
    /// Sampling seed; overrides `[run] seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Convexity index of every declared function.
    Index(Common),
    /// Quasiconvexity of every declared sum.
    SumCheck(Common),
    /// Property checks for every declared measure.
    RiskCheck(Common),
    /// Block-basis demonstration.
    L2Demo(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Index(a) => (Command::Index, a),
        Sub::SumCheck(a) => (Command::SumCheck, a),
        Sub::RiskCheck(a) => (Command::RiskCheck, a),
        Sub::L2Demo(a) => (Command::L2Demo, a),
    };
    if let Some(k) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("qcx: cannot configure {k} threads: {e}");
            return ExitCode::from(64);
        }
    }
    let cfg = match config::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qcx: {e}");
            return ExitCode::from(64);
        }
    };
    let opts = Options {
        brute: args.brute,
        seed: args.seed,
    };
    let outcome = match run_command(command, &cfg, &opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("qcx: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    print!("{}", outcome.text);
    let mut writes: Vec<(PathBuf, String)> = outcome.files;
    if let Some(out) = args.out {
        writes.push((out, outcome.json));
    }
    for (path, body) in writes {
        if let Err(e) = std::fs::write(&path, body) {
            eprintln!("qcx: cannot write {}: {e}", path.display());
            return ExitCode::from(64);
        }
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}
