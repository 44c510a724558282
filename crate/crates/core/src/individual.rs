//! Evaluated solutions and the constraint-violation aggregate.

use crate::error::{Error, Result};

/// Default tolerance used when turning `h(x) = 0` into `tol - |h(x)| >= 0`.
pub const DEFAULT_EQ_TOLERANCE: f64 = 1e-4;

/// A decision vector together with its objective values and overall
/// constraint violation. Built once by [`crate::problems::evaluate`] and never
/// mutated afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    x: Vec<f64>,
    f: Vec<f64>,
    violation: f64,
}

impl Individual {
    pub(crate) fn new(x: Vec<f64>, f: Vec<f64>, violation: f64) -> Self {
        debug_assert!(violation >= 0.0);
        Self { x, f, violation }
    }

    /// Builds an individual from raw parts without a problem. Intended for
    /// tests and for re-loading stored archives; `violation` is clamped at 0.
    pub fn from_parts(x: Vec<f64>, f: Vec<f64>, violation: f64) -> Self {
        Self { x, f, violation: violation.max(0.0) }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn violation(&self) -> f64 {
        self.violation
    }

    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

/// Component-wise minimum and maximum of a set of objective vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealNadir {
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
}

impl IdealNadir {
    /// Returns `None` for an empty iterator.
    pub fn from_objectives<'a, I>(objectives: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut iter = objectives.into_iter();
        let first = iter.next()?;
        let mut ideal = first.to_vec();
        let mut nadir = first.to_vec();
        for f in iter {
            for (i, &v) in f.iter().enumerate() {
                ideal[i] = ideal[i].min(v);
                nadir[i] = nadir[i].max(v);
            }
        }
        Some(Self { ideal, nadir })
    }

    pub fn of_population(pop: &[Individual]) -> Option<Self> {
        Self::from_objectives(pop.iter().map(Individual::f))
    }
}

/// Sum of the magnitudes of all violated constraints. `inequalities` are raw
/// `g_i(x) >= 0` values; `transformed_equalities` are equality constraints
/// already passed through [`transform_equality`].
pub fn overall_violation(inequalities: &[f64], transformed_equalities: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (index, &v) in inequalities.iter().chain(transformed_equalities).enumerate() {
        if !v.is_finite() {
            return Err(Error::Evaluation { index });
        }
        if v < 0.0 {
            total += -v;
        }
    }
    Ok(total)
}

/// `tolerance - |h|`; non-negative exactly when `|h| <= tolerance`.
pub fn transform_equality(h: f64, tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::Config(format!("equality tolerance must be positive, got {tolerance}")));
    }
    Ok(tolerance - h.abs())
}

/// Pareto dominance for minimization on raw objective vectors. Feasibility is
/// not considered here.
///
/// Panics if the vectors differ in length.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors differ in length");
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}
