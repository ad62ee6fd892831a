use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use firmlab_cli::{list_builtins, run_file, RunOptions, ARTIFACT_VERSION, SEED_ENV};

#[derive(Parser)]
#[command(name = "firmlab", about = "Experiments on firm non-expansive maps", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task described by a JSON config.
    Run {
        config: PathBuf,
        /// Worker threads; defaults to the number of cores. Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Directory for the report and CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides FIRMLAB_SEED and the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List built-in spaces, maps and tasks.
    List,
    /// Print the artifact version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", list_builtins());
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("firmlab {ARTIFACT_VERSION}");
            ExitCode::SUCCESS
        }
        Command::Run { config, threads, out, seed } => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                if n == 0 {
                    eprintln!("error: --threads must be at least 1");
                    return ExitCode::from(2);
                }
                builder = builder.num_threads(n);
            }
            let pool = match builder.build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: thread pool: {e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { seed, seed_env: std::env::var(SEED_ENV).ok(), out_dir: out };
            match pool.install(|| run_file(&config, &opts)) {
                Ok(outcome) => {
                    let verdict = outcome.report.verdict;
                    match &outcome.json_path {
                        Some(p) => println!("{}: {} ({})", outcome.report.task, verdict.label(), p.display()),
                        None => print!("{}", outcome.json),
                    }
                    for w in &outcome.report.warnings {
                        eprintln!("warning: {w}");
                    }
                    ExitCode::from(verdict.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
