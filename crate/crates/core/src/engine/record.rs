//! Run results and their on-disk formats.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::individual::Individual;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Push,
    Pull,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Push => "push",
            Stage::Pull => "pull",
        }
    }
}

/// State of one completed generation.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub generation: usize,
    pub stage: Stage,
    pub r_k: f64,
    pub epsilon: f64,
    pub feasible_ratio: f64,
    /// Evaluations consumed once the generation finished.
    pub evals: usize,
    /// IGD of the archive, when the problem has a reference front.
    pub igd: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub switch_generation: Option<usize>,
    pub final_igd: Option<f64>,
    pub final_hv: Option<f64>,
    pub evals: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub archive: Vec<Individual>,
    pub population: Vec<Individual>,
    pub trace: Vec<TraceEntry>,
    pub switch_generation: Option<usize>,
    pub evals: usize,
    pub final_igd: Option<f64>,
    pub final_hv: Option<f64>,
}

impl RunRecord {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            problem: self.problem.clone(),
            algorithm: self.algorithm.clone(),
            seed: self.seed,
            switch_generation: self.switch_generation,
            final_igd: self.final_igd,
            final_hv: self.final_hv,
            evals: self.evals,
        }
    }

    pub fn generations(&self) -> usize {
        self.trace.len()
    }

    /// `f1,...,fm,violation`, one archive member per line.
    pub fn archive_csv(&self) -> String {
        let m = self.archive.first().or(self.population.first()).map_or(0, |i| i.f().len());
        let mut out = String::new();
        for j in 1..=m {
            let _ = write!(out, "f{j},");
        }
        out.push_str("violation\n");
        for ind in &self.archive {
            for v in ind.f() {
                let _ = write!(out, "{v:e},");
            }
            let _ = writeln!(out, "{:e}", ind.violation());
        }
        out
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("gen,stage,r_k,epsilon,feasible_ratio,evals\n");
        for t in &self.trace {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e},{}",
                t.generation,
                t.stage.as_str(),
                t.r_k,
                t.epsilon,
                t.feasible_ratio,
                t.evals
            );
        }
        out
    }

    pub fn summary_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.summary())?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `<prefix>archive.csv`, `<prefix>trace.csv` and
    /// `<prefix>summary.json` into `dir`, creating it if needed.
    pub fn write_files(&self, dir: &Path, prefix: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{prefix}archive.csv")), self.archive_csv())?;
        fs::write(dir.join(format!("{prefix}trace.csv")), self.trace_csv())?;
        fs::write(dir.join(format!("{prefix}summary.json")), self.summary_json()?)?;
        Ok(())
    }
}
