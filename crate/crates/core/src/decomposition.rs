//! Weight vectors, neighborhoods and Tchebycheff scalarization.

use crate::error::{Error, Result};

/// Weights below this are raised to it before dividing.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// A point on the unit simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        let sum: f64 = lambda.iter().sum();
        if lambda.iter().any(|&w| !(w >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("{lambda:?} is not on the unit simplex")));
        }
        Ok(Self(lambda))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Indices of the `T` subproblems closest to the owner, the owner first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood(Vec<usize>);

impl Neighborhood {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Simplex-lattice weights. Uses the smallest lattice with at least `n`
/// points, sorts it lexicographically and keeps the first `n`; for two
/// objectives this is exactly `((i-1)/(n-1), 1-(i-1)/(n-1))`.
pub fn generate_weights(m: usize, n: usize) -> Result<Vec<WeightVector>> {
    if m < 2 {
        return Err(Error::Config(format!("need at least two objectives, got {m}")));
    }
    if n < m {
        return Err(Error::Config(format!("population size {n} is smaller than objective count {m}")));
    }
    let mut h = 1;
    while lattice_size(h, m) < n {
        h += 1;
    }
    let mut points = Vec::with_capacity(lattice_size(h, m));
    let mut current = Vec::with_capacity(m);
    enumerate_lattice(h, m, &mut current, &mut points);
    // enumeration already yields ascending lexicographic order
    points.truncate(n);
    Ok(points
        .into_iter()
        .map(|counts| WeightVector(counts.into_iter().map(|c| c as f64 / h as f64).collect()))
        .collect())
}

fn lattice_size(h: usize, m: usize) -> usize {
    // C(h + m - 1, m - 1)
    let k = m - 1;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (h + k - i) as u128 / (i + 1) as u128;
    }
    acc.min(usize::MAX as u128) as usize
}

fn enumerate_lattice(remaining: usize, m: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == m - 1 {
        current.push(remaining);
        out.push(current.clone());
        current.pop();
        return;
    }
    for c in 0..=remaining {
        current.push(c);
        enumerate_lattice(remaining - c, m, current, out);
        current.pop();
    }
}

/// Neighborhoods by Euclidean distance between weights; ties go to the
/// smaller index and the owner always comes first.
pub fn build_neighborhoods(weights: &[WeightVector], t: usize) -> Result<Vec<Neighborhood>> {
    let n = weights.len();
    if t == 0 || t > n {
        return Err(Error::Config(format!("neighborhood size {t} must be in 1..={n}")));
    }
    Ok((0..n)
        .map(|i| {
            let mut others: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (squared_distance(weights[i].as_slice(), weights[j].as_slice()), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut idx = Vec::with_capacity(t);
            idx.push(i);
            idx.extend(others.into_iter().take(t - 1).map(|(_, j)| j));
            Neighborhood(idx)
        })
        .collect())
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `max_j |f_j - z_j| / max(lambda_j, 1e-6)`.
///
/// Panics on length mismatch.
pub fn tchebycheff(f: &[f64], lambda: &[f64], ideal: &[f64]) -> f64 {
    assert!(f.len() == lambda.len() && f.len() == ideal.len(), "tchebycheff: length mismatch");
    f.iter()
        .zip(lambda)
        .zip(ideal)
        .map(|((&fj, &wj), &zj)| (fj - zj).abs() / wj.max(WEIGHT_FLOOR))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(ws: &[WeightVector]) -> Vec<Vec<f64>> {
        ws.iter().map(|w| w.as_slice().to_vec()).collect()
    }

    #[test]
    fn two_objective_weights() {
        assert_eq!(
            raw(&generate_weights(2, 3).unwrap()),
            vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]
        );
        assert_eq!(raw(&generate_weights(2, 2).unwrap()), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let ws = generate_weights(2, 101).unwrap();
        for (i, w) in ws.iter().enumerate() {
            let t = i as f64 / 100.0;
            assert!((w.as_slice()[0] - t).abs() < 1e-15);
            assert!((w.as_slice()[1] - (1.0 - t)).abs() < 1e-15);
        }
    }

    #[test]
    fn three_objective_lattice() {
        assert_eq!(
            raw(&generate_weights(3, 6).unwrap()),
            vec![
                vec![0.0, 0.0, 1.0],
                vec![0.0, 0.5, 0.5],
                vec![0.0, 1.0, 0.0],
                vec![0.5, 0.0, 0.5],
                vec![0.5, 0.5, 0.0],
                vec![1.0, 0.0, 0.0],
            ]
        );
        // 7 needs H = 3 (10 points), truncated
        let ws = generate_weights(3, 7).unwrap();
        assert_eq!(ws.len(), 7);
        assert_eq!(ws[0].as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn weight_errors() {
        assert!(generate_weights(2, 1).is_err());
        assert!(generate_weights(3, 2).is_err());
        assert!(generate_weights(1, 5).is_err());
        assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![-0.5, 1.5]).is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let ws = generate_weights(2, 3).unwrap();
        let nb = build_neighborhoods(&ws, 2).unwrap();
        assert_eq!(nb[0].indices(), &[0, 1]);
        assert_eq!(nb[1].indices(), &[1, 0]);
        assert_eq!(nb[2].indices(), &[2, 1]);

        let full = build_neighborhoods(&ws, 3).unwrap();
        for (i, b) in full.iter().enumerate() {
            let mut s = b.indices().to_vec();
            s.sort();
            assert_eq!(s, vec![0, 1, 2]);
            assert_eq!(b.indices()[0], i);
        }
        let single = build_neighborhoods(&ws, 1).unwrap();
        for (i, b) in single.iter().enumerate() {
            assert_eq!(b.indices(), &[i]);
        }
        assert!(build_neighborhoods(&ws, 4).is_err());
    }

    #[test]
    fn tchebycheff_examples() {
        assert_eq!(tchebycheff(&[1.0, 2.0], &[0.5, 0.5], &[0.0, 0.0]), 4.0);
        assert_eq!(tchebycheff(&[0.3, 0.7], &[0.2, 0.8], &[0.3, 0.7]), 0.0);
        assert_eq!(tchebycheff(&[1.0, 2.0], &[1.0, 0.0], &[0.0, 0.0]), 2e6);
    }

    #[test]
    #[should_panic]
    fn tchebycheff_length_mismatch() {
        tchebycheff(&[1.0], &[0.5, 0.5], &[0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn weights_on_simplex_and_sorted(m in 2usize..5, n in 5usize..60) {
            let ws = generate_weights(m, n).unwrap();
            prop_assert_eq!(ws.len(), n);
            for w in &ws {
                prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(w.as_slice().iter().all(|&c| c >= 0.0));
            }
            for pair in ws.windows(2) {
                prop_assert!(pair[0].as_slice() < pair[1].as_slice());
            }
            prop_assert_eq!(raw(&ws), raw(&generate_weights(m, n).unwrap()));
        }

        #[test]
        fn neighborhoods_well_formed(n in 2usize..40, t in 1usize..40) {
            let t = t.min(n);
            let ws = generate_weights(2, n).unwrap();
            for (i, b) in build_neighborhoods(&ws, t).unwrap().iter().enumerate() {
                prop_assert_eq!(b.len(), t);
                prop_assert!(b.indices().contains(&i));
                let mut s = b.indices().to_vec();
                s.sort();
                s.dedup();
                prop_assert_eq!(s.len(), t);
            }
        }

        #[test]
        fn tchebycheff_properties(
            z in prop::collection::vec(-2.0f64..2.0, 3),
            d in prop::collection::vec(0.0f64..3.0, 3),
            bump in 0.0f64..1.0,
            j in 0usize..3,
            w in 1usize..5,
        ) {
            let lambda = generate_weights(3, 15).unwrap()[w * 2].as_slice().to_vec();
            let f: Vec<f64> = z.iter().zip(&d).map(|(a, b)| a + b).collect();
            let v = tchebycheff(&f, &lambda, &z);
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v == 0.0, f == z);
            let mut worse = f.clone();
            worse[j] += bump;
            let vw = tchebycheff(&worse, &lambda, &z);
            prop_assert!(vw >= v);
            // worse is dominated by (or equal to) f
            prop_assert!(tchebycheff(&f, &lambda, &z) <= vw);
        }
    }
}
