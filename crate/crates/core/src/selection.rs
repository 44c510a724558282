//! Pairwise replacement rules used when a child competes with a subproblem's
//! incumbent.

use rand::Rng;

use crate::decomposition::tchebycheff;
use crate::individual::Individual;

/// Which rule decides a replacement, with its current parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComparatorKind {
    /// Scalarized value only, constraints ignored.
    Push,
    /// Epsilon-relaxed comparison at the given level.
    Pull(f64),
    /// Constraint dominance principle.
    Cdp,
    /// Stochastic ranking with objective-only probability `p_f`.
    StochasticRanking(f64),
    /// Epsilon comparison driven by a fixed decay schedule.
    StaticEpsilon(f64),
}

impl ComparatorKind {
    /// Decides whether `child` should replace `incumbent`. Only
    /// `StochasticRanking` draws from `rng` (one draw per call).
    pub fn replace<R: Rng + ?Sized>(
        self,
        incumbent: &Individual,
        child: &Individual,
        lambda: &[f64],
        ideal: &[f64],
        rng: &mut R,
    ) -> bool {
        match self {
            ComparatorKind::Push => push_replace(incumbent, child, lambda, ideal),
            ComparatorKind::Pull(eps) | ComparatorKind::StaticEpsilon(eps) => {
                pull_replace(incumbent, child, lambda, ideal, eps)
            }
            ComparatorKind::Cdp => cdp_replace(incumbent, child, lambda, ideal),
            ComparatorKind::StochasticRanking(p_f) => sr_replace(incumbent, child, lambda, ideal, p_f, rng),
        }
    }
}

fn scalar_le(incumbent: &Individual, child: &Individual, lambda: &[f64], ideal: &[f64]) -> bool {
    tchebycheff(child.f(), lambda, ideal) <= tchebycheff(incumbent.f(), lambda, ideal)
}

pub fn push_replace(incumbent: &Individual, child: &Individual, lambda: &[f64], ideal: &[f64]) -> bool {
    scalar_le(incumbent, child, lambda, ideal)
}

/// Both within `epsilon`, or exactly equal violations: compare scalarized
/// values. Otherwise the smaller violation wins.
pub fn pull_replace(
    incumbent: &Individual,
    child: &Individual,
    lambda: &[f64],
    ideal: &[f64],
    epsilon: f64,
) -> bool {
    let (vc, vi) = (child.violation(), incumbent.violation());
    if (vc <= epsilon && vi <= epsilon) || vc == vi {
        scalar_le(incumbent, child, lambda, ideal)
    } else {
        vc < vi
    }
}

pub fn cdp_replace(incumbent: &Individual, child: &Individual, lambda: &[f64], ideal: &[f64]) -> bool {
    match (child.is_feasible(), incumbent.is_feasible()) {
        (true, true) => scalar_le(incumbent, child, lambda, ideal),
        (true, false) => true,
        (false, true) => false,
        (false, false) => {
            if child.violation() == incumbent.violation() {
                scalar_le(incumbent, child, lambda, ideal)
            } else {
                child.violation() < incumbent.violation()
            }
        }
    }
}

pub fn sr_replace<R: Rng + ?Sized>(
    incumbent: &Individual,
    child: &Individual,
    lambda: &[f64],
    ideal: &[f64],
    p_f: f64,
    rng: &mut R,
) -> bool {
    let u: f64 = rng.gen();
    if u < p_f {
        scalar_le(incumbent, child, lambda, ideal)
    } else {
        cdp_replace(incumbent, child, lambda, ideal)
    }
}
