//! Constrained problem abstraction and the desk-scale benchmark problems.
//!
//! Each desk problem shares the base
//!
//! ```text
//! x in [0,1]^n,  g(x) = sum_{i>=2} x_i^2,  f1 = x1,  f2 = 1 - x1 + g(x)
//! ```
//!
//! whose unconstrained front is `f1 + f2 = 1`. The constraints are written in
//! objective space so that each problem exhibits one way an infeasible region
//! can interact with the front:
//!
//! | name                | constraint                          | constrained front                 |
//! |---------------------|-------------------------------------|-----------------------------------|
//! | `deskcmop-block`    | `abs(f1 + f2 - 1.2) - 0.1 >= 0`     | `f1 + f2 = 1`                     |
//! | `deskcmop-boundary` | `f1 + f2 - 1.1 >= 0`                | `f1 + f2 = 1.1`                   |
//! | `deskcmop-partial`  | `(f1 - 0.45)^2 - 0.0225 >= 0`       | `f1 + f2 = 1`, `f1 ∉ (0.3, 0.6)`  |
//! | `deskcmop-eq`       | `x2 - 0.2 = 0`                      | `f1 + f2 = 1.04`                  |

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::individual::{overall_violation, transform_equality, Individual, DEFAULT_EQ_TOLERANCE};

/// Static description of a problem instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub name: String,
    /// Decision dimension.
    pub n: usize,
    /// Objective count.
    pub m: usize,
    #[serde(skip)]
    pub bounds: Vec<(f64, f64)>,
    /// Inequality constraint count.
    pub q: usize,
    /// Equality constraint count.
    pub p: usize,
    #[serde(skip)]
    pub eq_tolerance: f64,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config(format!("{}: dimension must be >= 1", self.name)));
        }
        if self.m < 2 {
            return Err(Error::Config(format!("{}: need at least two objectives", self.name)));
        }
        if self.bounds.len() != self.n {
            return Err(Error::Config(format!("{}: expected {} bounds", self.name, self.n)));
        }
        if let Some(i) = self.bounds.iter().position(|&(lo, hi)| !(lo < hi)) {
            return Err(Error::Config(format!("{}: empty bound interval at {i}", self.name)));
        }
        if !(self.eq_tolerance > 0.0) {
            return Err(Error::Config(format!("{}: equality tolerance must be positive", self.name)));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n && x.iter().zip(&self.bounds).all(|(&v, &(lo, hi))| v >= lo && v <= hi)
    }
}

/// A constrained minimization problem: `g_i(x) >= 0` and `h_j(x) = 0`.
pub trait Problem: Send + Sync {
    fn spec(&self) -> &ProblemSpec;

    fn objectives(&self, x: &[f64]) -> Vec<f64>;

    /// Raw inequality values `g_i(x)`. The objective values are passed in so
    /// constraints defined in objective space need not recompute them.
    fn inequalities(&self, x: &[f64], f: &[f64]) -> Vec<f64>;

    /// Raw equality values `h_j(x)`, before the tolerance transform.
    fn equalities(&self, x: &[f64]) -> Vec<f64>;

    /// Samples `count` points uniformly along the constrained front.
    fn reference_front(&self, _count: usize) -> Result<Vec<Vec<f64>>> {
        Err(Error::Unsupported(format!("{} has no analytic front", self.spec().name)))
    }

    /// A decision vector whose image is (approximately) the given front point.
    fn witness(&self, _point: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn name(&self) -> &str {
        &self.spec().name
    }
}

/// Objective vectors sampled from a problem's true constrained front.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceFront {
    pub points: Vec<Vec<f64>>,
}

impl ReferenceFront {
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        Self { points }
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// 1000 points for two objectives, 10000 for three or more.
    pub fn default_count(m: usize) -> usize {
        if m <= 2 {
            1000
        } else {
            10000
        }
    }
}

/// Evaluates `x` under `problem`. Equalities go through
/// [`transform_equality`] with the problem's tolerance.
pub fn evaluate(problem: &dyn Problem, x: &[f64]) -> Result<Individual> {
    let spec = problem.spec();
    if x.len() != spec.n {
        return Err(Error::Contract(format!("decision vector has length {}, expected {}", x.len(), spec.n)));
    }
    if !spec.contains(x) {
        return Err(Error::Contract("decision vector outside box bounds".into()));
    }
    let f = problem.objectives(x);
    let g = problem.inequalities(x, &f);
    let h = problem
        .equalities(x)
        .into_iter()
        .map(|h| transform_equality(h, spec.eq_tolerance))
        .collect::<Result<Vec<_>>>()?;
    let violation = overall_violation(&g, &h)?;
    Ok(Individual::new(x.to_vec(), f, violation))
}

pub fn sample_reference_front(problem: &dyn Problem, count: usize) -> Result<ReferenceFront> {
    if count == 0 {
        return Err(Error::Config("reference front size must be positive".into()));
    }
    problem.reference_front(count).map(ReferenceFront::new)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeskKind {
    Block,
    Boundary,
    Partial,
    Eq,
}

impl DeskKind {
    pub const ALL: [DeskKind; 4] = [DeskKind::Block, DeskKind::Boundary, DeskKind::Partial, DeskKind::Eq];

    pub fn name(self) -> &'static str {
        match self {
            DeskKind::Block => "deskcmop-block",
            DeskKind::Boundary => "deskcmop-boundary",
            DeskKind::Partial => "deskcmop-partial",
            DeskKind::Eq => "deskcmop-eq",
        }
    }

    /// Offset `c` of the front line `f1 + f2 = 1 + c`.
    fn front_offset(self) -> f64 {
        match self {
            DeskKind::Block | DeskKind::Partial => 0.0,
            DeskKind::Boundary => 0.1,
            DeskKind::Eq => 0.04,
        }
    }
}

const PARTIAL_GAP: (f64, f64) = (0.3, 0.6);

/// One of the four desk-scale benchmark problems.
#[derive(Clone, Debug)]
pub struct DeskProblem {
    kind: DeskKind,
    spec: ProblemSpec,
}

impl DeskProblem {
    pub const DEFAULT_DIMENSION: usize = 30;

    pub fn new(kind: DeskKind, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("{} needs n >= 2, got {n}", kind.name())));
        }
        let (q, p) = match kind {
            DeskKind::Eq => (0, 1),
            _ => (1, 0),
        };
        let spec = ProblemSpec {
            name: kind.name().to_string(),
            n,
            m: 2,
            bounds: vec![(0.0, 1.0); n],
            q,
            p,
            eq_tolerance: DEFAULT_EQ_TOLERANCE,
        };
        Ok(Self { kind, spec })
    }

    pub fn kind(&self) -> DeskKind {
        self.kind
    }
}

impl Problem for DeskProblem {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn objectives(&self, x: &[f64]) -> Vec<f64> {
        let g: f64 = x[1..].iter().map(|v| v * v).sum();
        vec![x[0], 1.0 - x[0] + g]
    }

    fn inequalities(&self, _x: &[f64], f: &[f64]) -> Vec<f64> {
        let s = f[0] + f[1];
        match self.kind {
            DeskKind::Block => vec![(s - 1.2).abs() - 0.1],
            DeskKind::Boundary => vec![s - 1.1],
            DeskKind::Partial => vec![(f[0] - 0.45).powi(2) - 0.0225],
            DeskKind::Eq => Vec::new(),
        }
    }

    fn equalities(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            DeskKind::Eq => vec![x[1] - 0.2],
            _ => Vec::new(),
        }
    }

    fn reference_front(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        let c = self.kind.front_offset();
        let step = |i: usize| if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
        let points = (0..count)
            .map(|i| {
                let t = step(i);
                let f1 = match self.kind {
                    DeskKind::Partial => {
                        let (a, b) = PARTIAL_GAP;
                        let s = t * (1.0 - (b - a));
                        if s <= a {
                            s
                        } else {
                            s + (b - a)
                        }
                    }
                    _ => t,
                };
                vec![f1, 1.0 - f1 + c]
            })
            .collect();
        Ok(points)
    }

    fn witness(&self, point: &[f64]) -> Option<Vec<f64>> {
        let mut x = vec![0.0; self.spec.n];
        x[0] = point[0].clamp(0.0, 1.0);
        x[1] = match self.kind {
            // nudge above the boundary so rounding cannot leave it infeasible
            DeskKind::Boundary => (0.1f64).sqrt() * (1.0 + 1e-9),
            DeskKind::Eq => 0.2,
            DeskKind::Block | DeskKind::Partial => 0.0,
        };
        Some(x)
    }
}

/// Wraps a problem and replaces every constraint with a constant that is
/// always satisfied. Objectives are untouched.
pub struct StubbedConstraints {
    inner: Arc<dyn Problem>,
}

impl StubbedConstraints {
    pub fn new(inner: Arc<dyn Problem>) -> Self {
        Self { inner }
    }
}

impl Problem for StubbedConstraints {
    fn spec(&self) -> &ProblemSpec {
        self.inner.spec()
    }

    fn objectives(&self, x: &[f64]) -> Vec<f64> {
        self.inner.objectives(x)
    }

    fn inequalities(&self, _x: &[f64], _f: &[f64]) -> Vec<f64> {
        vec![1.0; self.spec().q]
    }

    fn equalities(&self, _x: &[f64]) -> Vec<f64> {
        vec![0.0; self.spec().p]
    }

    fn reference_front(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        self.inner.reference_front(count)
    }
}

pub fn problem_names() -> Vec<&'static str> {
    DeskKind::ALL.iter().map(|k| k.name()).collect()
}

/// Looks a problem up in the static registry.
pub fn by_name(name: &str, n: usize) -> Result<Arc<dyn Problem>> {
    let kind = DeskKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| Error::Config(format!("unknown problem `{name}`")))?;
    Ok(Arc::new(DeskProblem::new(kind, n)?))
}

/// JSON listing of `(name, n, m, q, p)` for every registered problem.
pub fn manifest_json(n: usize) -> Result<String> {
    let specs = DeskKind::ALL
        .into_iter()
        .map(|k| DeskProblem::new(k, n).map(|p| p.spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(serde_json::to_string_pretty(&specs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::individual::dominates;

    fn desk(kind: DeskKind) -> DeskProblem {
        DeskProblem::new(kind, 5).unwrap()
    }

    fn x_at(f1: f64) -> Vec<f64> {
        let mut x = vec![0.0; 5];
        x[0] = f1;
        x
    }

    #[test]
    fn evaluate_examples() {
        let block = desk(DeskKind::Block);
        let ind = evaluate(&block, &x_at(0.5)).unwrap();
        assert_eq!(ind.f(), &[0.5, 0.5]);
        // |1.0 - 1.2| - 0.1 = 0.1 >= 0
        assert_eq!(ind.violation(), 0.0);

        let boundary = desk(DeskKind::Boundary);
        let ind = evaluate(&boundary, &x_at(0.5)).unwrap();
        assert_eq!(ind.f(), &[0.5, 0.5]);
        assert!((ind.violation() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn block_band_is_infeasible() {
        let block = desk(DeskKind::Block);
        // g = 0.2 puts f1 + f2 = 1.2, the middle of the band
        let mut x = x_at(0.3);
        x[1] = 0.2f64.sqrt();
        let ind = evaluate(&block, &x).unwrap();
        assert!((ind.violation() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn equality_problem_uses_tolerance() {
        let eq = desk(DeskKind::Eq);
        let mut x = x_at(0.5);
        x[1] = 0.2 + 5e-5;
        assert_eq!(evaluate(&eq, &x).unwrap().violation(), 0.0);
        x[1] = 0.7;
        let v = evaluate(&eq, &x).unwrap().violation();
        assert!((v - (0.5 - 1e-4)).abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_is_contract_error() {
        let block = desk(DeskKind::Block);
        assert!(matches!(evaluate(&block, &x_at(1.5)), Err(Error::Contract(_))));
        assert!(matches!(evaluate(&block, &[0.5]), Err(Error::Contract(_))));
    }

    #[test]
    fn reference_front_examples() {
        let block = desk(DeskKind::Block);
        let front = sample_reference_front(&block, 3).unwrap();
        assert_eq!(front.points, vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]);

        let boundary = desk(DeskKind::Boundary);
        let front = sample_reference_front(&boundary, 2).unwrap();
        assert_eq!(front.points, vec![vec![0.0, 1.1], vec![1.0, 0.1]]);

        for kind in DeskKind::ALL {
            let front = sample_reference_front(&desk(kind), 1).unwrap();
            assert_eq!(front.count(), 1);
        }
        assert!(sample_reference_front(&block, 0).is_err());
    }

    #[test]
    fn partial_front_skips_gap() {
        let partial = desk(DeskKind::Partial);
        let front = sample_reference_front(&partial, 1000).unwrap();
        assert!(front.points.iter().all(|p| p[0] <= 0.3 + 1e-12 || p[0] >= 0.6 - 1e-12));
        assert_eq!(front.points[0][0], 0.0);
        assert!((front.points[999][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fronts_are_mutually_non_dominated() {
        for kind in DeskKind::ALL {
            let front = desk(kind).reference_front(200).unwrap();
            for a in &front {
                for b in &front {
                    assert!(!dominates(a, b), "{kind:?}: {a:?} dominates {b:?}");
                }
            }
        }
    }

    #[test]
    fn witnesses_are_feasible_and_on_front() {
        for kind in DeskKind::ALL {
            let p = desk(kind);
            for point in p.reference_front(101).unwrap() {
                let x = p.witness(&point).unwrap();
                let ind = evaluate(&p, &x).unwrap();
                assert_eq!(ind.violation(), 0.0, "{kind:?} at {point:?}");
                assert!((ind.f()[0] - point[0]).abs() < 1e-12);
                assert!((ind.f()[1] - point[1]).abs() < 1e-8, "{kind:?} {:?} vs {point:?}", ind.f());
            }
        }
    }

    #[test]
    fn unconstrained_front_infeasible_for_boundary_feasible_for_block() {
        let block = desk(DeskKind::Block);
        let boundary = desk(DeskKind::Boundary);
        for i in 0..=100 {
            let x = x_at(i as f64 / 100.0);
            assert_eq!(evaluate(&block, &x).unwrap().violation(), 0.0);
            assert!(evaluate(&boundary, &x).unwrap().violation() > 0.0);
        }
    }

    #[test]
    fn evaluate_is_pure() {
        let p = desk(DeskKind::Partial);
        let x = vec![0.41, 0.3, 0.2, 0.1, 0.9];
        assert_eq!(evaluate(&p, &x).unwrap(), evaluate(&p, &x).unwrap());
    }

    #[test]
    fn stubbed_constraints_are_always_feasible() {
        let inner: Arc<dyn Problem> = Arc::new(desk(DeskKind::Boundary));
        let stub = StubbedConstraints::new(inner.clone());
        let x = x_at(0.5);
        let a = evaluate(&stub, &x).unwrap();
        let b = evaluate(inner.as_ref(), &x).unwrap();
        assert_eq!(a.f(), b.f());
        assert_eq!(a.violation(), 0.0);
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(by_name("deskcmop-partial", 5).unwrap().spec().n, 5);
        assert!(by_name("lir-cmop1", 5).is_err());
        assert!(DeskProblem::new(DeskKind::Block, 1).is_err());
        let manifest: serde_json::Value = serde_json::from_str(&manifest_json(30).unwrap()).unwrap();
        assert_eq!(manifest.as_array().unwrap().len(), 4);
        assert_eq!(manifest[3]["p"], 1);
        assert_eq!(manifest[0]["n"], 30);
    }
}
