//! Thin CLI over the experiment runner.
//!
//! Exit codes: 0 success, 1 config error, 2 invariant violation,
//! 3 numerical non-convergence.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use macromech::config::ExperimentConfig;
use macromech::runner::{run, RunOptions};

#[derive(Parser)]
#[command(name = "macromech", version, about = "Conditional mechanical-state engineering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write CSV + manifest outputs.
    Run {
        /// Path to the TOML experiment config.
        config: PathBuf,
        /// Output directory (default: current directory).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the config's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Assert `I <= <b†b>` and state normalization on every row.
        #[arg(long)]
        debug_invariants: bool,
        /// Worker threads (default: all cores). Results are identical
        /// regardless of the thread count.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, seed, debug_invariants, threads } => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("macromech: cannot configure {n} threads: {e}");
                    return ExitCode::from(1);
                }
            }
            let cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("macromech: {e}");
                    return ExitCode::from(1);
                }
            };
            let opts = RunOptions { out_dir: out, seed_override: seed, debug_invariants };
            match run(&cfg, &opts) {
                Ok(summary) => {
                    println!("wrote {}", summary.csv.display());
                    if let Some(w) = summary.wigner_csv {
                        println!("wrote {}", w.display());
                    }
                    if let Some(m) = summary.musweep_csv {
                        println!("wrote {}", m.display());
                    }
                    println!("wrote {}", summary.manifest.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("macromech: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
