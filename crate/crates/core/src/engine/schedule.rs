//! Push/pull switch detection and the epsilon level schedule.

use std::collections::VecDeque;

use crate::individual::IdealNadir;

/// Denominator floor in the relative change rates.
const CHANGE_FLOOR: f64 = 1e-6;

/// Value of the change rate before a full window has been observed.
pub const INITIAL_CHANGE_RATE: f64 = 1.0;

/// The last `window + 1` ideal/nadir pairs, oldest first.
#[derive(Clone, Debug)]
pub struct ChangeHistory {
    window: usize,
    entries: VecDeque<IdealNadir>,
}

impl ChangeHistory {
    pub fn new(window: usize) -> Self {
        Self { window, entries: VecDeque::with_capacity(window + 1) }
    }

    pub fn push(&mut self, entry: IdealNadir) {
        if self.entries.len() == self.window + 1 {
            self.entries.pop_front();
        }
        self.entries.push_back(entry);
    }

    /// `max(rz, rn)` between the newest entry and the one `window` generations
    /// earlier, or [`INITIAL_CHANGE_RATE`] while the window is not yet full.
    pub fn max_change_rate(&self) -> f64 {
        if self.entries.len() < self.window + 1 {
            return INITIAL_CHANGE_RATE;
        }
        let old = self.entries.front().expect("non-empty");
        let new = self.entries.back().expect("non-empty");
        max_change_rate(old, new)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Largest relative change of any ideal or nadir coordinate from `old` to
/// `new`, each relative to `max(|old_i|, 1e-6)`.
pub fn max_change_rate(old: &IdealNadir, new: &IdealNadir) -> f64 {
    relative_change(&old.ideal, &new.ideal).max(relative_change(&old.nadir, &new.nadir))
}

fn relative_change(old: &[f64], new: &[f64]) -> f64 {
    old.iter().zip(new).map(|(&o, &n)| (n - o).abs() / o.abs().max(CHANGE_FLOOR)).fold(0.0, f64::max)
}

/// Parameters of the epsilon level update during the pull stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonSchedule {
    /// Control generation; epsilon is 0 from here on.
    pub tc: usize,
    /// Feasible-ratio threshold.
    pub alpha: f64,
    /// Shrink rate used while the feasible ratio is below `alpha`.
    pub tau: f64,
    /// Decay exponent.
    pub cp: f64,
}

impl EpsilonSchedule {
    /// One step of the schedule at generation `k`:
    ///
    /// * `0` once `k >= tc`
    /// * `(1 - tau) * previous` while `feasible_ratio < alpha`
    /// * `initial * (1 - k/tc)^cp` otherwise
    pub fn update(&self, previous: f64, initial: f64, feasible_ratio: f64, k: usize) -> f64 {
        if k >= self.tc {
            0.0
        } else if feasible_ratio < self.alpha {
            (1.0 - self.tau) * previous
        } else {
            self.decay(initial, k)
        }
    }

    /// `initial * (1 - k/tc)^cp`, 0 from `tc` on.
    pub fn decay(&self, initial: f64, k: usize) -> f64 {
        if k >= self.tc {
            0.0
        } else {
            initial * (1.0 - k as f64 / self.tc as f64).powf(self.cp)
        }
    }
}
