use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use lobsim::analytics::{summarize, CrashConfig};
use lobsim::config::Config;
use lobsim::engine::run_simulation;
use lobsim::experiment::{self, run_batch};
use lobsim::output;

#[derive(Parser)]
#[command(name = "lobsim", version, about = "Agent-based limit-order-book market simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (key=value lines); defaults used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for Monte-Carlo batches (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a single run and write its session time series.
    Run {
        #[command(flatten)]
        common: Common,
        /// Scenario name (baseline, only-lft, gamma-h-<n>).
        #[arg(long, default_value = "baseline")]
        scenario: String,
        /// Seed of the run.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named experiment batch and write all artifacts and figures.
    Experiment {
        #[command(flatten)]
        common: Common,
        /// One of: baseline, only-lft, scenarios, gamma-sweep.
        name: String,
        /// Override the number of Monte-Carlo seeds.
        #[arg(long)]
        seeds: Option<u32>,
    },
    /// Run a named experiment and print its report without figures.
    Report {
        #[command(flatten)]
        common: Common,
        name: String,
        #[arg(long)]
        seeds: Option<u32>,
    },
    /// Produce the figures of one scenario batch.
    Figures {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "baseline")]
        scenario: String,
        #[arg(long)]
        seeds: Option<u32>,
    },
}

fn load_config(common: &Common, seeds: Option<u32>) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    if let Some(mc) = seeds {
        cfg.mc = mc;
    }
    Ok(cfg)
}

fn init_threads(threads: usize) -> Result<()> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { common, scenario, seed } => {
            init_threads(common.threads)?;
            let cfg = load_config(&common, None)?;
            let cfg = experiment::scenario_config(&cfg, &scenario)?;
            let run = run_simulation(&cfg, seed, &scenario)?;
            std::fs::create_dir_all(&common.out)?;
            let csv = common.out.join(format!("run_{seed}.csv"));
            output::write_run_csv(&csv, &run)?;
            output::write_run_sidecar(&common.out.join(format!("run_{seed}.json")), &cfg, &run)?;
            let crash_cfg = CrashConfig::from(&cfg);
            let stats = summarize(std::slice::from_ref(&run), &crash_cfg);
            let r = &stats.per_run[0];
            println!(
                "wrote {} ({} sessions, sigma_P={:.4}, {} flash crashes)",
                csv.display(),
                run.sessions.len(),
                r.sigma_p,
                r.n_crashes
            );
        }
        Command::Experiment { common, name, seeds } => {
            init_threads(common.threads)?;
            let cfg = load_config(&common, seeds)?;
            let report = experiment::run_experiment(&name, &cfg, &common.out, true)?;
            print!("{report}");
            println!("artifacts written to {}", common.out.display());
        }
        Command::Report { common, name, seeds } => {
            init_threads(common.threads)?;
            let cfg = load_config(&common, seeds)?;
            let report = experiment::run_experiment(&name, &cfg, &common.out, false)?;
            print!("{report}");
        }
        Command::Figures { common, scenario, seeds } => {
            init_threads(common.threads)?;
            let cfg = load_config(&common, seeds)?;
            let batch = run_batch(&cfg, &scenario)?;
            let dir = common.out.join("figs");
            experiment::write_batch_figures(&batch, &dir)?;
            println!("figures written to {}", dir.display());
        }
    }
    Ok(())
}
