use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oglp::config::{parse_config, ExperimentConfig};
use oglp::experiment::{self, BenchmarkOptions, Source};
use oglp::io::read_to_string;
use oglp::Error;

/// Exit code when a learner aborts because an iterate lost a node's degree.
const EXIT_BARRIER_BREACH: u8 = 3;
const EXIT_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(
    name = "oglp",
    version,
    about = "Online graph learning with dynamic priors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a ground-truth trajectory and its signal stream.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seed to simulate; defaults to the first configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the first configured predictor on one stream.
    Learn {
        #[arg(long)]
        config: PathBuf,
        /// Directory written by `simulate`; without it the stream is simulated.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every predictor on every seed and aggregate.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Pick beta per predictor from the configured grid first.
        #[arg(long)]
        search_beta: bool,
    },
}

fn load(path: &Path) -> oglp::Result<ExperimentConfig> {
    parse_config(&read_to_string(path)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BarrierBreach { .. } => ExitCode::from(EXIT_BARRIER_BREACH),
                _ => ExitCode::from(EXIT_FAILURE),
            }
        }
    }
}

fn dispatch(command: Command) -> oglp::Result<ExitCode> {
    match command {
        Command::Simulate { config, out, seed } => {
            let cfg = load(&config)?;
            let seed = seed.unwrap_or(cfg.seeds[0]);
            let s = experiment::simulate(&cfg, seed, &out)?;
            println!(
                "model={} d={} T={} seed={} B_z={:.6} min_true_degree={:.6} snapshots={}",
                s.model, s.nodes, s.rounds, s.seed, s.max_data_norm, s.min_true_degree, s.snapshots
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Learn {
            config,
            replay,
            out,
        } => {
            let cfg = load(&config)?;
            let source = match &replay {
                Some(dir) => Source::Replay(dir),
                None => Source::Fresh,
            };
            let o = experiment::learn(&cfg, source, &out)?;
            println!("{}", experiment::RunSummary::HEADER);
            println!("{}", o.summary.csv_row());
            println!("us_per_round={:.3}", o.micros_per_round);
            Ok(ExitCode::SUCCESS)
        }
        Command::Benchmark {
            config,
            out,
            search_beta,
        } => {
            let cfg = load(&config)?;
            let opts = BenchmarkOptions {
                search_beta,
                workers: BenchmarkOptions::workers_from_env()?,
            };
            let o = experiment::benchmark(&cfg, &opts, Some(&out))?;
            for (label, beta) in &o.betas {
                let rows: Vec<_> = o.rows_for(label).collect();
                let ok: Vec<f64> = rows.iter().filter_map(|r| r.final_rel_error).collect();
                let mean = ok.iter().sum::<f64>() / ok.len().max(1) as f64;
                println!(
                    "{label}: beta={beta} ok={}/{} mean_final_rel_error={mean:.6}",
                    ok.len(),
                    rows.len()
                );
            }
            for r in &o.recovery {
                match r.rounds {
                    Some(n) => println!(
                        "{}: switch t={} recovered after {n} rounds",
                        r.predictor, r.switch_t
                    ),
                    None => println!("{}: switch t={} did not recover", r.predictor, r.switch_t),
                }
            }
            if o.all_failed() {
                eprintln!("error: every run failed");
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
