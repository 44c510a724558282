//! Flat `key = value` experiment configuration.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::engine::{Algorithm, EngineConfig};
use crate::error::{Error, Result};
use crate::problems::{by_name, problem_names, DeskProblem};

/// Engine settings plus the problem × algorithm × run matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub engine: EngineConfig,
    /// Independent runs per (problem, algorithm); run `r` uses seed
    /// `engine.seed + r` for every algorithm.
    pub runs: usize,
    /// Decision-space dimension of the problems.
    pub n: usize,
    pub problems: Vec<String>,
    pub algorithms: Vec<Algorithm>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            runs: 30,
            n: DeskProblem::DEFAULT_DIMENSION,
            problems: problem_names().into_iter().map(str::to_string).collect(),
            algorithms: Algorithm::ALL.to_vec(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.engine.validate()?;
        if self.runs == 0 {
            return Err(Error::Config("runs must be >= 1".into()));
        }
        if self.problems.is_empty() || self.algorithms.is_empty() {
            return Err(Error::Config("problem and algorithm lists must be non-empty".into()));
        }
        for p in &self.problems {
            by_name(p, self.n)?;
        }
        Ok(())
    }

    /// Seeds of runs `0..runs`, shared by all algorithms.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.runs as u64).map(|r| self.engine.seed + r).collect()
    }

    /// Flat view of every setting, for experiment metadata.
    pub fn settings(&self) -> Settings {
        let e = &self.engine;
        Settings {
            pop: e.pop_size,
            neighbors: e.neighborhood_size,
            delta: e.delta,
            nr: e.max_replacements,
            tc: e.tc,
            alpha: e.alpha,
            tau: e.tau,
            cp: e.cp,
            l: e.window,
            switch_threshold: e.switch_threshold,
            evals: e.max_evals,
            runs: self.runs,
            cr: e.variation.de_cr,
            f: e.variation.de_f,
            eta_m: e.variation.eta_m,
            pm: e.variation.pm,
            n: self.n,
            seed: e.seed,
            sr_pf: e.sr_pf,
            theta: e.theta,
            problems: self.problems.clone(),
            algorithms: self.algorithms.iter().map(|a| a.name().to_string()).collect(),
        }
    }
}

/// Every configuration key with its effective value.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub pop: usize,
    pub neighbors: usize,
    pub delta: f64,
    pub nr: usize,
    pub tc: usize,
    pub alpha: f64,
    pub tau: f64,
    pub cp: f64,
    pub l: usize,
    pub switch_threshold: f64,
    pub evals: usize,
    pub runs: usize,
    pub cr: f64,
    pub f: f64,
    pub eta_m: f64,
    pub pm: Option<f64>,
    pub n: usize,
    pub seed: u64,
    pub sr_pf: f64,
    pub theta: f64,
    pub problems: Vec<String>,
    pub algorithms: Vec<String>,
}

/// Parses configuration text. Blank lines and `#` comments are ignored;
/// keys not given keep their defaults. The result is validated.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        apply(&mut cfg, key.trim(), value.trim(), line)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&fs::read_to_string(path)?)
}

fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str, line: usize) -> Result<()> {
    let e = &mut cfg.engine;
    match key {
        "pop" => e.pop_size = parse(key, value, line)?,
        "neighbors" => e.neighborhood_size = parse(key, value, line)?,
        "delta" => e.delta = parse(key, value, line)?,
        "nr" => e.max_replacements = parse(key, value, line)?,
        "tc" => e.tc = parse(key, value, line)?,
        "alpha" => e.alpha = parse(key, value, line)?,
        "tau" => e.tau = parse(key, value, line)?,
        "cp" => e.cp = parse(key, value, line)?,
        "l" => e.window = parse(key, value, line)?,
        "switch_threshold" => e.switch_threshold = parse(key, value, line)?,
        "evals" => e.max_evals = parse(key, value, line)?,
        "cr" => e.variation.de_cr = parse(key, value, line)?,
        "f" => e.variation.de_f = parse(key, value, line)?,
        "eta_m" => e.variation.eta_m = parse(key, value, line)?,
        "pm" => e.variation.pm = Some(parse(key, value, line)?),
        "seed" => e.seed = parse(key, value, line)?,
        "sr_pf" => e.sr_pf = parse(key, value, line)?,
        "theta" => e.theta = parse(key, value, line)?,
        "runs" => cfg.runs = parse(key, value, line)?,
        "n" => cfg.n = parse(key, value, line)?,
        "problems" => cfg.problems = list(value).map(str::to_string).collect(),
        "algorithms" => {
            cfg.algorithms = list(value)
                .map(|a| {
                    a.parse().map_err(|_| Error::Parse { line, message: format!("unknown algorithm `{a}`") })
                })
                .collect::<Result<_>>()?
        }
        _ => return Err(Error::UnknownKey { key: key.to_string(), line }),
    }
    Ok(())
}

fn parse<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("cannot read `{value}` as the value of `{key}`") })
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}
