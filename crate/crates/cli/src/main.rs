use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use poleplace_cli::commands::{self, CommandError};

/// Experiment runner for the pole placement adaptive controller: run
/// configs, reproduce the built-in figure experiments, and verify the
/// closed-loop properties on concrete trajectories.
#[derive(Parser)]
#[command(name = "poleplace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a JSON config and write trace.csv + analysis.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: $POLEPLACE_OUT_DIR or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a built-in figure experiment (1a, 1b, 2, 3).
    Figure {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite: prop1, charpoly, envelope, remark2, all.
    Verify { suite: String },
    /// The first-order counterexample sweep over disturbance-free initial
    /// conditions y(0) = eps.
    Remark2 {
        /// Comma-separated epsilon values, e.g. 1e-2,1e-3,1e-4.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
    },
}

fn default_out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os("POLEPLACE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn fail(err: CommandError) -> ExitCode {
    eprintln!("error: {}", err.message());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => match commands::cmd_run(&config, &default_out_dir(out)) {
            Ok(output) => {
                for warning in &output.warnings {
                    eprintln!("warning: {warning}");
                }
                println!("wrote {}", output.trace_path.display());
                println!("wrote {}", output.analysis_path.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Figure { id, out } => match commands::cmd_figure(&id, &default_out_dir(out)) {
            Ok(paths) => {
                for path in paths {
                    println!("wrote {}", path.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { suite } => match commands::cmd_verify(&suite) {
            Ok((results, ok)) => {
                for check in &results {
                    let status = if check.pass { "PASS" } else { "FAIL" };
                    println!("{status} {} {}", check.name, check.detail);
                }
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(e),
        },
        Command::Remark2 { eps } => match commands::cmd_remark2(&eps) {
            Ok(table) => {
                print!("{table}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}
