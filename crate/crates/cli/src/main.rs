use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use clusterpeierls::{config, runner, svg};

/// Environment variable naming the default root for experiment outputs.
const OUT_ENV: &str = "CLUSTERPEIERLS_OUT";

#[derive(Parser)]
#[command(
    name = "clusterpeierls",
    version,
    about = "Cluster-state computation and Ising thermodynamics experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON-configured experiment, writing CSV artifacts and a manifest.
    Run {
        /// Path to the experiment configuration (JSON).
        config: PathBuf,
        /// Override the config's RNG seed (ignored by deterministic tables).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to $CLUSTERPEIERLS_OUT/<config stem>,
        /// or runs/<config stem> when the variable is unset.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for parallel sub-experiments; 1 forces serial runs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Render the paired order-parameter chart (M vs T, I vs t) as SVG.
    Render {
        /// Temperature-sweep CSV (ising-sweep output).
        #[arg(long)]
        sweep: PathBuf,
        /// Computation-trace CSV (analogy-trace output).
        #[arg(long)]
        trace: PathBuf,
        /// Destination SVG file.
        #[arg(long)]
        out: PathBuf,
    },
}

fn default_out_dir(config_path: &Path) -> PathBuf {
    let stem = config_path
        .file_stem()
        .map_or_else(|| "experiment".into(), |s| s.to_string_lossy().into_owned());
    let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(stem)
}

fn run(config_path: &Path, seed: Option<u64>, out: Option<PathBuf>, jobs: Option<usize>) -> ExitCode {
    if let Some(jobs) = jobs {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
        if let Err(err) = pool {
            eprintln!("clusterpeierls: cannot configure {jobs} worker thread(s): {err}");
            return ExitCode::from(2);
        }
    }
    let mut cfg = match config::parse_config(config_path) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("clusterpeierls: {}: {err}", config_path.display());
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = seed {
        if !cfg.set_seed(seed) {
            eprintln!(
                "note: --seed ignored: `{}` experiments are deterministic tables",
                cfg.kind()
            );
        }
    }
    let out_dir = out.unwrap_or_else(|| default_out_dir(config_path));
    match runner::run_experiment(&cfg, &out_dir) {
        Ok(outcome) => {
            for file in &outcome.csv_files {
                println!("wrote {}", file.display());
            }
            println!("wrote {}", outcome.manifest.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("clusterpeierls: experiment `{}` failed: {err}", cfg.kind());
            ExitCode::FAILURE
        }
    }
}

fn render(sweep: &Path, trace: &Path, out: &Path) -> ExitCode {
    match svg::render_curves(sweep, trace, out) {
        Ok(()) => {
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("clusterpeierls: render failed: {err}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            seed,
            out,
            jobs,
        } => run(&config, seed, out, jobs),
        Command::Render { sweep, trace, out } => render(&sweep, &trace, &out),
    }
}
