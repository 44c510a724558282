//! The decomposition engine with push-and-pull search.
//!
//! Each generation:
//!
//! 1. record the population's ideal/nadir pair and, once `l` generations are
//!    available, the change rate `r_k`;
//! 2. while pushing, switch to pulling once `r_k` has been computed and is at
//!    most `switch_threshold`, with `epsilon(0)` set to the largest violation
//!    in the population;
//! 3. while pulling, update epsilon from the feasible ratio;
//! 4. visit subproblems in a random order, build one DE child per subproblem
//!    from its neighborhood (probability `delta`) or the whole population,
//!    update the ideal point and let the child replace at most `nr`
//!    incumbents drawn from the same mating pool;
//! 5. merge the population into the feasible non-dominated archive.
//!
//! Random draws are consumed in a fixed order from one ChaCha8 stream seeded by
//! `EngineConfig::seed`: initial population (row by row), then per generation
//! the permutation, and per child the pool draw, parent indices, DE draws,
//! mutation draws and the replacement picks (plus one draw per comparison for
//! stochastic ranking).

mod archive;
mod record;
mod schedule;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use archive::{crowding_distances, is_valid_archive, nd_select};
pub use record::{RunRecord, RunSummary, Stage, TraceEntry};
pub use schedule::{max_change_rate, ChangeHistory, EpsilonSchedule, INITIAL_CHANGE_RATE};

use crate::decomposition::{build_neighborhoods, generate_weights};
use crate::error::{Error, Result};
use crate::individual::{IdealNadir, Individual};
use crate::metrics::{hypervolume, igd, reference_point};
use crate::problems::{evaluate, Problem, ReferenceFront};
use crate::selection::ComparatorKind;
use crate::variation::{de_offspring, polynomial_mutation, VariationConfig};

/// Constraint handling strategy driving the replacement rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Push stage without constraints, then the epsilon pull stage.
    Pps,
    /// Constraint dominance from the first generation.
    Cdp,
    /// Stochastic ranking from the first generation.
    Sr,
    /// Epsilon comparison with the classic decaying level.
    Epsilon,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Pps, Algorithm::Cdp, Algorithm::Sr, Algorithm::Epsilon];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pps => "pps",
            Algorithm::Cdp => "cdp",
            Algorithm::Sr => "sr",
            Algorithm::Epsilon => "epsilon",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    /// Population size and number of subproblems.
    pub pop_size: usize,
    pub neighborhood_size: usize,
    /// Probability of mating within the neighborhood.
    pub delta: f64,
    /// Most incumbents a single child may replace.
    pub max_replacements: usize,
    /// Control generation of the epsilon schedule.
    pub tc: usize,
    pub alpha: f64,
    pub tau: f64,
    pub cp: f64,
    /// Length `l` of the change-rate window.
    pub window: usize,
    pub switch_threshold: f64,
    pub max_evals: usize,
    pub seed: u64,
    pub variation: VariationConfig,
    /// Objective-only comparison probability for stochastic ranking.
    pub sr_pf: f64,
    /// Fraction of the population whose violation sets the initial level of
    /// the `epsilon` algorithm.
    pub theta: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            pop_size: 300,
            neighborhood_size: 30,
            delta: 0.9,
            max_replacements: 2,
            tc: 800,
            alpha: 0.95,
            tau: 0.1,
            cp: 2.0,
            window: 20,
            switch_threshold: 1e-3,
            max_evals: 300_000,
            seed: 1,
            variation: VariationConfig::default(),
            sr_pf: 0.05,
            theta: 0.05,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Config(msg));
        if self.pop_size < 3 {
            return err(format!("population size must be >= 3, got {}", self.pop_size));
        }
        if self.neighborhood_size == 0 || self.neighborhood_size > self.pop_size {
            return err(format!(
                "neighborhood size must be in 1..={}, got {}",
                self.pop_size, self.neighborhood_size
            ));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("alpha", self.alpha),
            ("tau", self.tau),
            ("sr_pf", self.sr_pf),
            ("theta", self.theta),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return err(format!("{name} must be in [0,1], got {v}"));
            }
        }
        if self.max_replacements == 0 {
            return err("nr must be >= 1".into());
        }
        if self.tc == 0 {
            return err("tc must be >= 1".into());
        }
        if !(self.cp > 0.0) {
            return err(format!("cp must be > 0, got {}", self.cp));
        }
        if self.window == 0 {
            return err("l must be >= 1".into());
        }
        if !(self.switch_threshold >= 0.0) {
            return err(format!("switch threshold must be >= 0, got {}", self.switch_threshold));
        }
        if self.max_evals < 2 * self.pop_size {
            return err(format!(
                "budget of {} evaluations does not cover initialization plus one generation of {}",
                self.max_evals, self.pop_size
            ));
        }
        self.variation.validate()
    }

    pub fn epsilon_schedule(&self) -> EpsilonSchedule {
        EpsilonSchedule { tc: self.tc, alpha: self.alpha, tau: self.tau, cp: self.cp }
    }

    /// Whole generations the budget allows after initialization.
    pub fn generations(&self) -> usize {
        self.max_evals.saturating_sub(self.pop_size) / self.pop_size.max(1)
    }
}

/// Engine state after a generation, handed to observers.
pub struct GenerationView<'a> {
    pub generation: usize,
    pub stage: Stage,
    pub epsilon: f64,
    pub r_k: f64,
    pub feasible_ratio: f64,
    pub evals: usize,
    /// Running ideal point used by the scalarization.
    pub ideal: &'a [f64],
    pub population: &'a [Individual],
    pub archive: &'a [Individual],
}

pub fn run(problem: &dyn Problem, config: &EngineConfig, algorithm: Algorithm) -> Result<RunRecord> {
    run_observed(problem, config, algorithm, |_| {})
}

/// Like [`run`], calling `observer` after every generation.
pub fn run_observed<F>(
    problem: &dyn Problem,
    config: &EngineConfig,
    algorithm: Algorithm,
    mut observer: F,
) -> Result<RunRecord>
where
    F: FnMut(&GenerationView<'_>),
{
    config.validate()?;
    let spec = problem.spec();
    spec.validate()?;
    let n = config.pop_size;
    let weights = generate_weights(spec.m, n)?;
    let neighborhoods = build_neighborhoods(&weights, config.neighborhood_size)?;
    let everyone: Vec<usize> = (0..n).collect();
    let reference =
        problem.reference_front(ReferenceFront::default_count(spec.m)).ok().map(ReferenceFront::new);
    let ref_point = reference.as_ref().map(reference_point).transpose()?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pop = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = spec.bounds.iter().map(|&(lo, hi)| lo + rng.gen::<f64>() * (hi - lo)).collect();
        pop.push(evaluate(problem, &x)?);
    }
    let mut evals = n;
    let mut ideal = IdealNadir::of_population(&pop).expect("non-empty population").ideal;
    let mut archive = nd_select(&[], &pop, n);

    let schedule = config.epsilon_schedule();
    let mut history = ChangeHistory::new(config.window);
    let mut stage = if algorithm == Algorithm::Pps { Stage::Push } else { Stage::Pull };
    let mut switch_generation = None;
    let mut r_k = INITIAL_CHANGE_RATE;
    let mut epsilon0 = match algorithm {
        Algorithm::Epsilon => ranked_violation(&pop, config.theta),
        _ => 0.0,
    };
    let mut epsilon = epsilon0;
    let mut trace = Vec::with_capacity(config.generations());
    let mut k = 0;

    while evals + n <= config.max_evals {
        let feasible_ratio = pop.iter().filter(|i| i.is_feasible()).count() as f64 / n as f64;
        history.push(IdealNadir::of_population(&pop).expect("non-empty population"));
        if k >= config.window {
            r_k = history.max_change_rate();
        }

        match algorithm {
            Algorithm::Pps if k < schedule.tc => {
                if stage == Stage::Push && k >= config.window && r_k <= config.switch_threshold {
                    stage = Stage::Pull;
                    epsilon0 = max_violation(&pop);
                    epsilon = epsilon0;
                    switch_generation = Some(k);
                }
                if stage == Stage::Pull {
                    // capped so the level never grows back once it has shrunk
                    epsilon = schedule.update(epsilon, epsilon0, feasible_ratio, k).min(epsilon);
                }
            }
            Algorithm::Pps => {
                if stage == Stage::Push {
                    stage = Stage::Pull;
                    epsilon0 = max_violation(&pop);
                    switch_generation = Some(k);
                }
                epsilon = 0.0;
            }
            Algorithm::Epsilon => epsilon = schedule.decay(epsilon0, k),
            Algorithm::Cdp | Algorithm::Sr => {}
        }

        let comparator = match (algorithm, stage) {
            (Algorithm::Pps, Stage::Push) => ComparatorKind::Push,
            (Algorithm::Pps, Stage::Pull) => ComparatorKind::Pull(epsilon),
            (Algorithm::Cdp, _) => ComparatorKind::Cdp,
            (Algorithm::Sr, _) => ComparatorKind::StochasticRanking(config.sr_pf),
            (Algorithm::Epsilon, _) => ComparatorKind::StaticEpsilon(epsilon),
        };

        let mut order = everyone.clone();
        order.shuffle(&mut rng);
        for &j in &order {
            let pool: &[usize] = if rng.gen::<f64>() < config.delta && neighborhoods[j].len() >= 3 {
                neighborhoods[j].indices()
            } else {
                &everyone
            };
            let (r1, r2) = pick_parents(pool, j, &mut rng);
            let trial =
                de_offspring(pop[j].x(), pop[r1].x(), pop[r2].x(), &spec.bounds, &config.variation, &mut rng);
            let y = polynomial_mutation(&trial, &spec.bounds, &config.variation, &mut rng);
            let child = evaluate(problem, &y)?;
            evals += 1;
            for (z, &f) in ideal.iter_mut().zip(child.f()) {
                if f < *z {
                    *z = f;
                }
            }

            let mut candidates = pool.to_vec();
            let mut replaced = 0;
            while replaced < config.max_replacements && !candidates.is_empty() {
                let idx = candidates.swap_remove(rng.gen_range(0..candidates.len()));
                if comparator.replace(&pop[idx], &child, weights[idx].as_slice(), &ideal, &mut rng) {
                    pop[idx] = child.clone();
                    replaced += 1;
                }
            }
        }

        archive = nd_select(&archive, &pop, n);
        debug_assert!(is_valid_archive(&archive));
        let archive_igd = reference.as_ref().and_then(|r| igd(r, &objectives(&archive)).ok());
        trace.push(TraceEntry {
            generation: k,
            stage,
            r_k,
            epsilon,
            feasible_ratio,
            evals,
            igd: archive_igd,
        });
        observer(&GenerationView {
            generation: k,
            stage,
            epsilon,
            r_k,
            feasible_ratio,
            evals,
            ideal: &ideal,
            population: &pop,
            archive: &archive,
        });
        k += 1;
    }

    let final_objs = objectives(&archive);
    let final_igd = reference.as_ref().and_then(|r| igd(r, &final_objs).ok());
    let final_hv = match &ref_point {
        Some(rp) if spec.m <= 3 => Some(hypervolume(&final_objs, &rp.point)?),
        _ => None,
    };
    Ok(RunRecord {
        problem: spec.name.clone(),
        algorithm: algorithm.name().to_string(),
        seed: config.seed,
        archive,
        population: pop,
        trace,
        switch_generation,
        evals,
        final_igd,
        final_hv,
    })
}

/// Two distinct parents from `pool`, both different from `current`.
fn pick_parents<R: Rng + ?Sized>(pool: &[usize], current: usize, rng: &mut R) -> (usize, usize) {
    let draw = |rng: &mut R, exclude: &[usize]| loop {
        let c = pool[rng.gen_range(0..pool.len())];
        if !exclude.contains(&c) {
            break c;
        }
    };
    let r1 = draw(rng, &[current]);
    let r2 = draw(rng, &[current, r1]);
    (r1, r2)
}

fn max_violation(pop: &[Individual]) -> f64 {
    pop.iter().map(Individual::violation).fold(0.0, f64::max)
}

/// Violation of the individual at rank `floor(theta * N)` when sorted by
/// increasing violation.
fn ranked_violation(pop: &[Individual], theta: f64) -> f64 {
    let mut v: Vec<f64> = pop.iter().map(Individual::violation).collect();
    v.sort_by(f64::total_cmp);
    let idx = ((theta * v.len() as f64).floor() as usize).min(v.len() - 1);
    v[idx]
}

fn objectives(members: &[Individual]) -> Vec<Vec<f64>> {
    members.iter().map(|i| i.f().to_vec()).collect()
}
