//! Differential-evolution offspring and polynomial mutation.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct VariationConfig {
    /// DE scale factor.
    pub de_f: f64,
    /// DE binomial crossover rate.
    pub de_cr: f64,
    /// Per-dimension mutation probability; `None` means `1/n`.
    pub pm: Option<f64>,
    /// Polynomial mutation distribution index.
    pub eta_m: f64,
}

impl Default for VariationConfig {
    fn default() -> Self {
        Self { de_f: 0.5, de_cr: 1.0, pm: None, eta_m: 20.0 }
    }
}

impl VariationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.de_f > 0.0) {
            return Err(Error::Config(format!("DE scale factor must be > 0, got {}", self.de_f)));
        }
        if !(0.0..=1.0).contains(&self.de_cr) {
            return Err(Error::Config(format!("crossover rate must be in [0,1], got {}", self.de_cr)));
        }
        if let Some(pm) = self.pm {
            if !(0.0..=1.0).contains(&pm) {
                return Err(Error::Config(format!("mutation probability must be in [0,1], got {pm}")));
            }
        }
        if !(self.eta_m > 0.0) {
            return Err(Error::Config(format!("distribution index must be > 0, got {}", self.eta_m)));
        }
        Ok(())
    }

    pub fn mutation_probability(&self, n: usize) -> f64 {
        self.pm.unwrap_or(1.0 / n as f64)
    }
}

/// `base + F * (r1 - r2)` on the dimensions picked by binomial crossover, one
/// random dimension always taken. Components leaving the box are pulled back
/// to the midpoint between `base` and the violated bound.
///
/// Panics if the vectors or bounds differ in length.
pub fn de_offspring<R: Rng + ?Sized>(
    base: &[f64],
    r1: &[f64],
    r2: &[f64],
    bounds: &[(f64, f64)],
    cfg: &VariationConfig,
    rng: &mut R,
) -> Vec<f64> {
    let n = base.len();
    assert!(r1.len() == n && r2.len() == n && bounds.len() == n, "de_offspring: dimension mismatch");
    let forced = rng.gen_range(0..n);
    (0..n)
        .map(|d| {
            let take = rng.gen::<f64>() < cfg.de_cr || d == forced;
            if !take {
                return base[d];
            }
            let v = base[d] + cfg.de_f * (r1[d] - r2[d]);
            let (lo, hi) = bounds[d];
            if v < lo {
                (base[d] + lo) / 2.0
            } else if v > hi {
                (base[d] + hi) / 2.0
            } else {
                v
            }
        })
        .collect()
}

/// Mutates each dimension with probability `pm`; the result stays in bounds.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &[f64],
    bounds: &[(f64, f64)],
    cfg: &VariationConfig,
    rng: &mut R,
) -> Vec<f64> {
    let pm = cfg.mutation_probability(x.len());
    x.iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| {
            if rng.gen::<f64>() < pm {
                let u = rng.gen::<f64>();
                polynomial_perturbation(v, lo, hi, u, cfg.eta_m)
            } else {
                v
            }
        })
        .collect()
}

/// Bounded polynomial perturbation of a single component for a given uniform
/// draw `u`. Zero shift at `u = 0.5`.
pub fn polynomial_perturbation(y: f64, lo: f64, hi: f64, u: f64, eta: f64) -> f64 {
    let span = hi - lo;
    if span <= 0.0 {
        return y;
    }
    let delta1 = (y - lo) / span;
    let delta2 = (hi - y) / span;
    let power = 1.0 / (eta + 1.0);
    let deltaq = if u <= 0.5 {
        let xy = 1.0 - delta1;
        let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
        val.powf(power) - 1.0
    } else {
        let xy = 1.0 - delta2;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(power)
    };
    (y + deltaq * span).clamp(lo, hi)
}
