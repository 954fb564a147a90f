use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use majorana_core::runner::{exit_code, run_experiment, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "majorana", version, about = "Run one Majorana-lattice experiment")]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON experiment config; defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::new(cli.experiment)),
    };
    let result = cfg.and_then(|cfg| {
        let out = cli.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
        run_experiment(&cfg, cli.experiment, &out)
    });
    match result {
        Ok(r) => {
            if cli.verbose {
                for f in &r.files {
                    eprintln!("wrote {}", f.display());
                }
            }
            println!("{}: {}", cli.experiment.name(), r.summary);
            if r.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
