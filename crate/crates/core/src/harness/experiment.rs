//! Single runs, the full comparison matrix and the window-length sweep.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Settings};
use crate::engine::{run, Algorithm, EngineConfig, RunRecord, RunSummary};
use crate::error::{Error, Result};
use crate::problems::by_name;
use crate::stats::{build_comparison_table, summarize, ComparisonTable, Orientation, RunValues, Summary};

/// Significance level of the rank-sum comparisons.
pub const SIGNIFICANCE: f64 = 0.05;

/// One run of `algorithm` on the named problem with the given seed.
pub fn run_single(
    cfg: &ExperimentConfig,
    problem: &str,
    algorithm: Algorithm,
    seed: u64,
) -> Result<RunRecord> {
    let p = by_name(problem, cfg.n)?;
    let engine = EngineConfig { seed, ..cfg.engine.clone() };
    run(p.as_ref(), &engine, algorithm)
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub summaries: Vec<RunSummary>,
    pub igd: Option<ComparisonTable>,
    pub hv: Option<ComparisonTable>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    settings: Settings,
    seeds: Vec<u64>,
    /// Run `r` of every algorithm uses the same seed.
    paired_seeds: bool,
    baseline: &'a str,
}

/// Runs every (problem, algorithm, seed) combination on a pool of `jobs`
/// threads (0 means one per available core) and writes
///
/// * `<problem>/<algorithm>/seed<s>_{archive.csv,trace.csv,summary.json}`
/// * `table_igd.{csv,txt}` and `table_hv.{csv,txt}`
/// * `experiment.json` with the settings and seeds
///
/// under `out`. Tables compare every algorithm with `pps` when it is part
/// of the matrix, otherwise with the first algorithm listed.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> Result<ExperimentReport> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    let seeds = cfg.seeds();
    let mut tasks: Vec<(&str, Algorithm, u64)> = Vec::new();
    for p in &cfg.problems {
        for &a in &cfg.algorithms {
            tasks.extend(seeds.iter().map(|&s| (p.as_str(), a, s)));
        }
    }

    let summaries = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(problem, alg, seed)| {
                let record = run_single(cfg, problem, alg, seed)?;
                let dir = out.join(problem).join(alg.name());
                record.write_files(&dir, &format!("seed{seed}_"))?;
                log::info!("{problem} {alg} seed {seed}: igd {:?}", record.final_igd);
                Ok(record.summary())
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let baseline = if cfg.algorithms.contains(&Algorithm::Pps) { Algorithm::Pps } else { cfg.algorithms[0] };
    let igd = write_table(&summaries, baseline, |s| s.final_igd, Orientation::Minimize, out, "table_igd")?;
    let hv = write_table(&summaries, baseline, |s| s.final_hv, Orientation::Maximize, out, "table_hv")?;

    let meta = Metadata { settings: cfg.settings(), seeds, paired_seeds: true, baseline: baseline.name() };
    let mut json = serde_json::to_string_pretty(&meta)?;
    json.push('\n');
    fs::write(out.join("experiment.json"), json)?;
    Ok(ExperimentReport { summaries, igd, hv })
}

fn write_table(
    summaries: &[RunSummary],
    baseline: Algorithm,
    metric: impl Fn(&RunSummary) -> Option<f64>,
    orientation: Orientation,
    out: &Path,
    stem: &str,
) -> Result<Option<ComparisonTable>> {
    let mut values = RunValues::new();
    for s in summaries {
        if let Some(v) = metric(s) {
            values.entry((s.algorithm.clone(), s.problem.clone())).or_default().push(v);
        }
    }
    if !values.keys().any(|(a, _)| a == baseline.name()) {
        log::warn!("no {stem} values for the baseline, table skipped");
        return Ok(None);
    }
    let table = build_comparison_table(&values, baseline.name(), orientation, SIGNIFICANCE)?;
    fs::write(out.join(format!("{stem}.csv")), table.to_csv())?;
    fs::write(out.join(format!("{stem}.txt")), table.to_text())?;
    Ok(Some(table))
}

/// Aggregated PPS results for one window length.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub l: usize,
    pub igd: Option<Summary>,
    pub hv: Option<Summary>,
}

/// Runs PPS on `problem` for every window length in `values`, `cfg.runs`
/// seeds each, and writes `sweep_l.csv` (one row per length) and
/// `sweep_l_runs.csv` (one row per run) under `out`.
pub fn sweep_l(
    cfg: &ExperimentConfig,
    problem: &str,
    values: &[usize],
    out: &Path,
    jobs: usize,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("no window lengths to sweep".into()));
    }
    for &l in values {
        ExperimentConfig { engine: EngineConfig { window: l, ..cfg.engine.clone() }, ..cfg.clone() }
            .validate()?;
    }
    by_name(problem, cfg.n)?;
    fs::create_dir_all(out)?;
    let seeds = cfg.seeds();
    let tasks: Vec<(usize, u64)> = values.iter().flat_map(|&l| seeds.iter().map(move |&s| (l, s))).collect();
    let summaries = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(l, seed)| {
                let c = ExperimentConfig {
                    engine: EngineConfig { window: l, ..cfg.engine.clone() },
                    ..cfg.clone()
                };
                run_single(&c, problem, Algorithm::Pps, seed).map(|r| r.summary())
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut runs_csv = String::from("l,seed,igd,hv,switch_generation\n");
    for (&(l, seed), s) in tasks.iter().zip(&summaries) {
        let _ = writeln!(
            runs_csv,
            "{l},{seed},{},{},{}",
            opt(s.final_igd),
            opt(s.final_hv),
            s.switch_generation.map(|g| g.to_string()).unwrap_or_default()
        );
    }

    let mut rows = Vec::with_capacity(values.len());
    let mut csv = String::from("l,mean_igd,std_igd,mean_hv,std_hv,runs\n");
    for (chunk, &l) in summaries.chunks(seeds.len()).zip(values) {
        let igd: Vec<f64> = chunk.iter().filter_map(|s| s.final_igd).collect();
        let hv: Vec<f64> = chunk.iter().filter_map(|s| s.final_hv).collect();
        let igd = (!igd.is_empty()).then(|| summarize(&igd)).transpose()?;
        let hv = (!hv.is_empty()).then(|| summarize(&hv)).transpose()?;
        let _ = writeln!(
            csv,
            "{l},{},{},{},{},{}",
            opt(igd.as_ref().map(|s| s.mean)),
            opt(igd.as_ref().map(|s| s.std)),
            opt(hv.as_ref().map(|s| s.mean)),
            opt(hv.as_ref().map(|s| s.std)),
            chunk.len()
        );
        rows.push(SweepRow { l, igd, hv });
    }
    fs::write(out.join("sweep_l.csv"), csv)?;
    fs::write(out.join("sweep_l_runs.csv"), runs_csv)?;
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}
