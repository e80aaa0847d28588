use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flatrack::commands::{analyze, metrics_summary, simulate, sweep, AnalyzeOptions};
use flatrack::CliError;

/// Newton-Raphson tracking controllers for differentially flat systems.
#[derive(Parser)]
#[command(name = "flatrack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trace CSV and metrics JSON.
    Simulate { scenario: PathBuf },
    /// Report stability certificates for a plant or integrator chain.
    Analyze {
        /// `pendulum`, `bicycle` or `chain1`..`chain6`
        target: String,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 100.0)]
        alpha: f64,
        #[arg(long = "alpha-max", default_value_t = flatrack_core::stability::DEFAULT_ALPHA_MAX)]
        alpha_max: f64,
        /// Samples drawn for the Lipschitz ratio estimates.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a scenario once per value of a parameter and tabulate the metrics.
    Sweep {
        scenario: PathBuf,
        /// `T`, `alpha` or `x0[i]`
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { scenario } => {
            let out = simulate(&scenario)?;
            print!("{}", metrics_summary(&out.metrics));
            println!("trace               {}", out.trace_path.display());
            println!("metrics             {}", out.metrics_path.display());
        }
        Command::Analyze {
            target,
            horizon,
            alpha,
            alpha_max,
            samples,
            seed,
        } => {
            let report = analyze(
                &target,
                AnalyzeOptions {
                    horizon,
                    alpha,
                    alpha_max,
                    samples,
                    seed,
                },
            )?;
            print!("{}", report.text);
            println!("report              {}", report.path.display());
            if let Some(reason) = report.infeasible() {
                return Err(CliError::Infeasible(reason));
            }
        }
        Command::Sweep {
            scenario,
            param,
            values,
        } => {
            let out = sweep(&scenario, &param, &values)?;
            print!("{}", out.csv);
            println!("written to {}", out.path.display());
            if let Some(err) = out.rows.into_iter().find_map(|r| r.outcome.err()) {
                return Err(err);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
