use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fpp_cli::dist_check::dist_check;
use fpp_cli::error::{CliError, Result};
use fpp_cli::{plot, run};
use fpp_core::EdgeWeightModel;

#[derive(Parser)]
#[command(name = "fpp", version, about = "First-passage percolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its CSV and summary.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads; results do not depend on this.
        #[arg(long, env = "FPP_THREADS")]
        threads: Option<usize>,
    },
    /// Plot log p against n^r from a results CSV.
    Plot { csv: PathBuf, svg: PathBuf },
    /// Check a law's sampler against its closed forms.
    DistCheck {
        model: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| CliError::Runtime(e.to_string()))
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => {
            let cfg = fpp_cli::ExperimentConfig::load(&config)?;
            let pool = pool(threads)?;
            let outcome = pool.install(|| run::run(&cfg, &out))?;
            println!("{}", outcome.csv_path.display());
            println!("{}", outcome.summary_path.display());
        }
        Command::Plot { csv, svg } => {
            let data = plot::plot_file(&csv, &svg)?;
            for s in &data.series {
                if let Some(m) = s.slope {
                    println!("{} slope {m:.6}", s.estimator);
                }
            }
            if let Some(m) = data.theory_slope {
                println!("theory slope {m:.6}");
            }
        }
        Command::DistCheck {
            model,
            samples,
            seed,
        } => {
            let text = std::fs::read_to_string(&model)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", model.display())))?;
            let m: EdgeWeightModel =
                serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
            if samples == 0 {
                return Err(CliError::Config("--samples must be positive".into()));
            }
            let report = dist_check(&m, samples, seed)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
