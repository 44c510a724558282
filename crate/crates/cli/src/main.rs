use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};
use pps_core::engine::Algorithm;
use pps_core::harness::{load_config, run_experiment, run_single, sweep_l, ExperimentConfig};
use pps_core::problems::{by_name, manifest_json, problem_names, DeskProblem};

#[derive(Parser)]
#[command(name = "pps", version, about = "Push-and-pull search for constrained multi-objective problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by subcommands that build on a config file.
#[derive(clap::Args)]
struct Overrides {
    /// Config file with `key = value` lines; flags below take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluation budget per run.
    #[arg(long)]
    evals: Option<usize>,
    /// Population size.
    #[arg(long)]
    pop: Option<usize>,
    /// Neighborhood size (capped at the population size).
    #[arg(long)]
    neighbors: Option<usize>,
    /// Decision-space dimension.
    #[arg(long)]
    n: Option<usize>,
}

impl Overrides {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        let e = &mut cfg.engine;
        if let Some(v) = self.evals {
            e.max_evals = v;
        }
        if let Some(v) = self.pop {
            e.pop_size = v;
            e.neighborhood_size = e.neighborhood_size.min(v);
        }
        if let Some(v) = self.neighbors {
            e.neighborhood_size = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// One run; writes archive.csv, trace.csv and summary.json.
    Run {
        #[arg(long, value_parser = PossibleValuesParser::new(problem_names()))]
        problem: String,
        #[arg(long, default_value = "pps", value_parser = PossibleValuesParser::new(Algorithm::ALL.map(Algorithm::name)))]
        algorithm: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Every problem × algorithm × seed of a config, plus comparison tables.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads; 0 uses every available core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// PPS over a range of change-window lengths `l`.
    SweepL {
        /// Comma-separated window lengths.
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,70,80,90,100")]
        values: Vec<usize>,
        #[arg(long, default_value = "deskcmop-partial", value_parser = PossibleValuesParser::new(problem_names()))]
        problem: String,
        /// Runs per window length.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Registered problems with their sizes.
    ListProblems {
        /// Print the JSON manifest instead of a table.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DeskProblem::DEFAULT_DIMENSION)]
        n: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { problem, algorithm, seed, out, overrides } => {
            let cfg = overrides.resolve()?;
            let algorithm: Algorithm = algorithm.parse()?;
            let record = run_single(&cfg, &problem, algorithm, seed)?;
            record.write_files(&out, "").with_context(|| format!("writing to {}", out.display()))?;
            println!(
                "{problem} {algorithm} seed {seed}: {} evaluations, archive {}, igd {}, hv {}",
                record.evals,
                record.archive.len(),
                fmt_opt(record.final_igd),
                fmt_opt(record.final_hv)
            );
        }
        Command::Experiment { config, out, jobs } => {
            let cfg = load_config(&config).with_context(|| format!("reading {}", config.display()))?;
            let report = run_experiment(&cfg, &out, jobs)?;
            println!("{} runs written to {}", report.summaries.len(), out.display());
            if let Some(t) = report.igd {
                println!("IGD\n{}", t.to_text());
            }
            if let Some(t) = report.hv {
                println!("HV\n{}", t.to_text());
            }
        }
        Command::SweepL { values, problem, runs, out, jobs, overrides } => {
            let mut cfg = overrides.resolve()?;
            if let Some(r) = runs {
                cfg.runs = r;
            }
            let rows = sweep_l(&cfg, &problem, &values, &out, jobs)?;
            println!("{:>6} {:>14} {:>14}", "l", "mean IGD", "mean HV");
            for row in rows {
                println!(
                    "{:>6} {:>14} {:>14}",
                    row.l,
                    fmt_opt(row.igd.map(|s| s.mean)),
                    fmt_opt(row.hv.map(|s| s.mean))
                );
            }
            println!("written to {}", Path::new(&out).join("sweep_l.csv").display());
        }
        Command::ListProblems { json, n } => {
            if json {
                println!("{}", manifest_json(n)?);
            } else {
                println!("{:<20} {:>4} {:>3} {:>3} {:>3}", "name", "n", "m", "q", "p");
                for name in problem_names() {
                    let p = by_name(name, n)?;
                    let s = p.spec();
                    println!("{:<20} {:>4} {:>3} {:>3} {:>3}", s.name, s.n, s.m, s.q, s.p);
                }
            }
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.4e}"))
}
