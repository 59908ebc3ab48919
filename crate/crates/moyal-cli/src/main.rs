//! Batch driver: runs verification suites from JSON configs, writes
//! machine-readable reports and plot traces, exits 0 iff every check passes.

mod config;
mod describe;
mod experiments;
mod report;

use clap::{Parser, Subcommand};
use moyal::error::MoyalError;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "moyal", version, about = "Moyal star-product verification driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        /// Path to the config file.
        config: String,
        /// Override grid points per axis.
        #[arg(long = "grid-N", value_name = "N")]
        grid_n: Option<usize>,
        /// Override grid half-extent L.
        #[arg(long = "grid-L", value_name = "L")]
        grid_l: Option<f64>,
        /// Override the canonical θ₀ scale.
        #[arg(long = "theta0", value_name = "T0")]
        theta0: Option<f64>,
    },
    /// Print the formula and conventions behind a component.
    Describe {
        /// Topic name; an unknown name lists the available topics.
        topic: String,
    },
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("MOYAL_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                // ignore the error if a pool is already installed
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config: path, grid_n, grid_l, theta0 } => {
            let overrides = config::Overrides { grid_n, grid_l, theta0 };
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {path}: {e}");
                    return ExitCode::from(2);
                }
            };
            let cfg = match config::parse_config(&text, &overrides) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match experiments::run(&cfg) {
                Ok((rep, plot)) => {
                    if let Err(e) = report::write_outputs(&cfg.output, &rep, &plot) {
                        eprintln!("error: cannot write outputs: {e}");
                        return ExitCode::from(2);
                    }
                    for c in &rep.checks {
                        println!(
                            "[{}] {}: measured {:.6e} vs tolerance {:.3e}{}",
                            if c.passed { "pass" } else { "FAIL" },
                            c.name,
                            c.measured,
                            c.tolerance,
                            c.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default(),
                        );
                    }
                    println!(
                        "{}: {} — wrote {}.report.json and {}.plot.csv",
                        rep.experiment,
                        if rep.passed { "all checks passed" } else { "CHECKS FAILED" },
                        cfg.output,
                        cfg.output
                    );
                    if rep.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e @ MoyalError::Config(_)) | Err(e @ MoyalError::Usage(_)) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("error while running experiment: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Describe { topic } => match describe::describe(&topic) {
            Ok(text) => {
                println!("{topic}\n{}\n{text}", "-".repeat(topic.len()));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
