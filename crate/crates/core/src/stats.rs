//! Run aggregation and the rank-sum comparison behind the result tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std: f64,
    pub n: usize,
    /// Set when fewer than two values made the deviation meaningless.
    pub degenerate: bool,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    let n = values.len();
    if n == 0 {
        return Err(Error::UndefinedMetric("summary of an empty sample".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        log::warn!("single-value sample, standard deviation reported as 0");
        return Ok(Summary { mean, std: 0.0, n, degenerate: true });
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(Summary { mean, std: (ss / (n - 1) as f64).sqrt(), n, degenerate: false })
}

/// Outcome of a two-sample comparison, phrased for smaller-is-better data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Sample `a` is significantly smaller.
    ABetter,
    /// Sample `b` is significantly smaller.
    BBetter,
    NoDifference,
}

impl Verdict {
    pub fn swapped(self) -> Self {
        match self {
            Verdict::ABetter => Verdict::BBetter,
            Verdict::BBetter => Verdict::ABetter,
            Verdict::NoDifference => Verdict::NoDifference,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankSumTest {
    pub p_value: f64,
    pub verdict: Verdict,
    /// Sum of the midranks of sample `a` in the pooled sample.
    pub rank_sum_a: f64,
}

/// Midranks (1-based) of the pooled values, ties sharing the average rank.
/// Also returns `sum(t^3 - t)` over tie groups.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        let t = (end - start) as f64;
        ties += t * t * t - t;
        start = end;
    }
    (ranks, ties)
}

/// Two-sided Wilcoxon rank-sum test using the normal approximation with
/// tie-corrected variance and a 0.5 continuity correction.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], significance: f64) -> Result<RankSumTest> {
    if a.len() < 4 || b.len() < 4 {
        return Err(Error::Config(format!(
            "rank-sum test needs at least 4 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let n = n1 + n2;
    let rank_sum_a: f64 = ranks[..a.len()].iter().sum();
    let mean = n1 * (n + 1.0) / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(RankSumTest { p_value: 1.0, verdict: Verdict::NoDifference, rank_sum_a });
    }
    let z = ((rank_sum_a - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let p_value = erfc(z / std::f64::consts::SQRT_2).min(1.0);
    let verdict = if p_value < significance {
        if rank_sum_a < mean {
            Verdict::ABetter
        } else {
            Verdict::BBetter
        }
    } else {
        Verdict::NoDifference
    };
    Ok(RankSumTest { p_value, verdict, rank_sum_a })
}

/// Whether smaller or larger metric values are better.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Minimize,
    Maximize,
}

/// How a compared algorithm fares against the baseline on one problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Marker {
    /// Significantly worse than the baseline.
    Worse,
    /// Significantly better than the baseline.
    Better,
    None,
    Incomplete,
}

impl Marker {
    fn symbol(self) -> &'static str {
        match self {
            Marker::Worse => "†",
            Marker::Better => "‡",
            Marker::None => "",
            Marker::Incomplete => "?",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Marker::Worse => "worse",
            Marker::Better => "better",
            Marker::None => "none",
            Marker::Incomplete => "incomplete",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub summary: Option<Summary>,
    pub marker: Option<Marker>,
    pub p_value: Option<f64>,
}

/// Superior / not different / inferior counts of the baseline against one
/// algorithm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub superior: usize,
    pub no_difference: usize,
    pub inferior: usize,
}

impl std::fmt::Display for Tally {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}-{}", self.superior, self.no_difference, self.inferior)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub baseline: String,
    pub problems: Vec<String>,
    /// Baseline first, the rest in name order.
    pub algorithms: Vec<String>,
    /// Keyed by `(problem, algorithm)`.
    pub cells: BTreeMap<(String, String), Cell>,
    pub tallies: BTreeMap<String, Tally>,
}

/// Per-run metric values keyed by `(algorithm, problem)`.
pub type RunValues = BTreeMap<(String, String), Vec<f64>>;

pub fn build_comparison_table(
    records: &RunValues,
    baseline: &str,
    orientation: Orientation,
    significance: f64,
) -> Result<ComparisonTable> {
    let algorithms: BTreeSet<&str> = records.keys().map(|(a, _)| a.as_str()).collect();
    if !algorithms.contains(baseline) {
        return Err(Error::Config(format!("baseline `{baseline}` has no runs")));
    }
    let problems: BTreeSet<&str> = records.keys().map(|(_, p)| p.as_str()).collect();
    let mut ordered = vec![baseline.to_string()];
    ordered.extend(algorithms.iter().filter(|&&a| a != baseline).map(|a| a.to_string()));

    let mut cells = BTreeMap::new();
    let mut tallies: BTreeMap<String, Tally> =
        ordered[1..].iter().map(|a| (a.clone(), Tally::default())).collect();

    for &problem in &problems {
        let base = records.get(&(baseline.to_string(), problem.to_string()));
        for alg in &ordered {
            let values = records.get(&(alg.clone(), problem.to_string()));
            let summary = values.filter(|v| !v.is_empty()).map(|v| summarize(v)).transpose()?;
            let (marker, p_value) = if alg == baseline {
                (None, None)
            } else {
                match (base, values) {
                    (Some(b), Some(v)) if b.len() >= 4 && v.len() >= 4 => {
                        let test = wilcoxon_rank_sum(b, v, significance)?;
                        let baseline_wins = match (test.verdict, orientation) {
                            (Verdict::NoDifference, _) => None,
                            (Verdict::ABetter, Orientation::Minimize)
                            | (Verdict::BBetter, Orientation::Maximize) => Some(true),
                            _ => Some(false),
                        };
                        let tally = tallies.get_mut(alg).expect("tally per algorithm");
                        let marker = match baseline_wins {
                            Some(true) => {
                                tally.superior += 1;
                                Marker::Worse
                            }
                            Some(false) => {
                                tally.inferior += 1;
                                Marker::Better
                            }
                            None => {
                                tally.no_difference += 1;
                                Marker::None
                            }
                        };
                        (Some(marker), Some(test.p_value))
                    }
                    _ => (Some(Marker::Incomplete), None),
                }
            };
            cells.insert((problem.to_string(), alg.clone()), Cell { summary, marker, p_value });
        }
    }
    Ok(ComparisonTable {
        baseline: baseline.to_string(),
        problems: problems.into_iter().map(str::to_string).collect(),
        algorithms: ordered,
        cells,
        tallies,
    })
}

impl ComparisonTable {
    pub fn cell(&self, problem: &str, algorithm: &str) -> Option<&Cell> {
        self.cells.get(&(problem.to_string(), algorithm.to_string()))
    }

    /// Long format: one row per cell, then one `S-D-I` row per algorithm.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("problem,algorithm,mean,std,runs,marker,p_value\n");
        for p in &self.problems {
            for a in &self.algorithms {
                let cell = &self.cells[&(p.clone(), a.clone())];
                let (mean, std, n) = match &cell.summary {
                    Some(s) => (format!("{:e}", s.mean), format!("{:e}", s.std), s.n.to_string()),
                    None => (String::new(), String::new(), "0".into()),
                };
                let marker = cell.marker.map_or("baseline", Marker::label);
                let pv = cell.p_value.map(|v| format!("{v:e}")).unwrap_or_default();
                let _ = writeln!(out, "{p},{a},{mean},{std},{n},{marker},{pv}");
            }
        }
        for a in &self.algorithms[1..] {
            let _ = writeln!(out, "S-D-I,{a},,,,{},", self.tallies[a]);
        }
        out
    }

    /// Plain-text layout: a mean row and a std row per problem.
    pub fn to_text(&self) -> String {
        const W: usize = 16;
        let mut out = String::new();
        let _ = write!(out, "{:<20}{:<6}", "problem", "");
        for a in &self.algorithms {
            let _ = write!(out, "{a:>W$}");
        }
        out.push('\n');
        for p in &self.problems {
            for (label, pick) in [("mean", 0), ("std", 1)] {
                let _ = write!(out, "{:<20}{label:<6}", if pick == 0 { p.as_str() } else { "" });
                for a in &self.algorithms {
                    let cell = &self.cells[&(p.clone(), a.clone())];
                    let text = match &cell.summary {
                        Some(s) if pick == 0 => {
                            format!("{:.3E}{}", s.mean, cell.marker.map_or("", Marker::symbol))
                        }
                        Some(s) => format!("{:.3E}", s.std),
                        None => "-".into(),
                    };
                    let _ = write!(out, "{text:>W$}");
                }
                out.push('\n');
            }
        }
        let _ = write!(out, "{:<26}{:>W$}", "Wilcoxon-Test (S-D-I)", "--");
        for a in &self.algorithms[1..] {
            let _ = write!(out, "{:>W$}", self.tallies[a].to_string());
        }
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exact two-sided p-value by enumerating every assignment of the pooled
    /// midranks to sample `a`.
    fn exact_p(a: &[f64], b: &[f64]) -> f64 {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let (ranks, _) = midranks(&pooled);
        let n = pooled.len();
        let k = a.len();
        let mean = k as f64 * (n as f64 + 1.0) / 2.0;
        let observed = (ranks[..k].iter().sum::<f64>() - mean).abs();
        let (mut hits, mut total) = (0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            total += 1;
            if (s - mean).abs() >= observed - 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.std), (1.0, 0.0));
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.std), (2.0, 1.0));
        let s = summarize(&[5.0]).unwrap();
        assert_eq!((s.mean, s.std, s.degenerate), (5.0, 0.0, true));
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn summarize_matches_compensated_accumulation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let values: Vec<f64> = (0..1000).map(|_| rng.gen::<f64>() * 1e3 + 1e6).collect();
        // Kahan-summed two-pass oracle
        let kahan = |it: &mut dyn Iterator<Item = f64>| {
            let (mut s, mut c) = (0.0f64, 0.0f64);
            for v in it {
                let y = v - c;
                let t = s + y;
                c = (t - s) - y;
                s = t;
            }
            s
        };
        let mean = kahan(&mut values.iter().copied()) / 1000.0;
        let var = kahan(&mut values.iter().map(|v| (v - mean) * (v - mean))) / 999.0;
        let s = summarize(&values).unwrap();
        assert!((s.mean - mean).abs() <= 1e-12 * mean.abs());
        assert!((s.std - var.sqrt()).abs() <= 1e-12 * var.sqrt().max(1.0));
    }

    #[test]
    fn midrank_ties() {
        let (r, ties) = midranks(&[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(r, vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(ties, 6.0);
    }

    #[test]
    fn rank_sum_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let t = wilcoxon_rank_sum(&a, &a, 0.05).unwrap();
        assert_eq!(t.verdict, Verdict::NoDifference);
        assert_eq!(t.p_value, 1.0);

        let t = wilcoxon_rank_sum(&a, &[10.0, 11.0, 12.0, 13.0], 0.05).unwrap();
        assert_eq!(t.verdict, Verdict::ABetter);
        // exact: 2 / C(8,4)
        assert!((exact_p(&a, &[10.0, 11.0, 12.0, 13.0]) - 2.0 / 70.0).abs() < 1e-15);
        assert!((t.p_value - 2.0 / 70.0).abs() < 0.02);

        let t = wilcoxon_rank_sum(&[1.0, 3.0, 5.0, 7.0], &[2.0, 4.0, 6.0, 8.0], 0.05).unwrap();
        assert_eq!(t.verdict, Verdict::NoDifference);
        assert!(exact_p(&[1.0, 3.0, 5.0, 7.0], &[2.0, 4.0, 6.0, 8.0]) > 0.05);

        let same = [3.0; 5];
        let t = wilcoxon_rank_sum(&same, &same, 0.05).unwrap();
        assert_eq!((t.p_value, t.verdict), (1.0, Verdict::NoDifference));

        assert!(wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &a, 0.05).is_err());
    }

    #[test]
    fn large_sample_matches_reference_value() {
        // pooled 1..=60 split evenly low/high: R_a = 465, mean 915, var 4575
        let a: Vec<f64> = (1..=30).map(f64::from).collect();
        let b: Vec<f64> = (31..=60).map(f64::from).collect();
        let t = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        let z: f64 = (450.0 - 0.5) / 4575f64.sqrt();
        assert!((t.p_value - erfc(z / std::f64::consts::SQRT_2)).abs() < 1e-15);
        assert!(t.p_value < 1e-10);
    }

    fn values(map: &[(&str, &str, Vec<f64>)]) -> RunValues {
        map.iter().map(|(a, p, v)| ((a.to_string(), p.to_string()), v.clone())).collect()
    }

    #[test]
    fn table_identical_runs() {
        let v: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let recs = values(&[
            ("pps", "p1", v.clone()),
            ("pps", "p2", v.clone()),
            ("cdp", "p1", v.clone()),
            ("cdp", "p2", v.clone()),
        ]);
        let t = build_comparison_table(&recs, "pps", Orientation::Minimize, 0.05).unwrap();
        assert_eq!(t.tallies["cdp"], Tally { superior: 0, no_difference: 2, inferior: 0 });
        assert_eq!(t.cell("p1", "cdp").unwrap().marker, Some(Marker::None));
    }

    #[test]
    fn table_baseline_dominates() {
        let low: Vec<f64> = (0..10).map(f64::from).collect();
        let high: Vec<f64> = (100..110).map(f64::from).collect();
        let recs = values(&[
            ("pps", "p1", low.clone()),
            ("pps", "p2", low.clone()),
            ("pps", "p3", low.clone()),
            ("sr", "p1", high.clone()),
            ("sr", "p2", high.clone()),
            ("sr", "p3", high.clone()),
        ]);
        let t = build_comparison_table(&recs, "pps", Orientation::Minimize, 0.05).unwrap();
        assert_eq!(t.tallies["sr"].to_string(), "3-0-0");
        assert_eq!(t.cell("p2", "sr").unwrap().marker, Some(Marker::Worse));

        // for a larger-is-better metric the same data flips
        let t = build_comparison_table(&recs, "pps", Orientation::Maximize, 0.05).unwrap();
        assert_eq!(t.tallies["sr"].to_string(), "0-0-3");
        assert!(t.to_text().contains("0-0-3"));
        assert!(t.to_csv().contains("S-D-I,sr,,,,0-0-3,"));
    }

    #[test]
    fn table_missing_cell_excluded() {
        let low: Vec<f64> = (0..10).map(f64::from).collect();
        let high: Vec<f64> = (100..110).map(f64::from).collect();
        let recs = values(&[
            ("pps", "p1", low.clone()),
            ("pps", "p2", low.clone()),
            ("pps", "p3", low.clone()),
            ("cdp", "p1", high.clone()),
            ("cdp", "p3", high.clone()),
        ]);
        let t = build_comparison_table(&recs, "pps", Orientation::Minimize, 0.05).unwrap();
        assert_eq!(t.tallies["cdp"].to_string(), "2-0-0");
        assert_eq!(t.cell("p2", "cdp").unwrap().marker, Some(Marker::Incomplete));
        assert!(build_comparison_table(&recs, "ieps", Orientation::Minimize, 0.05).is_err());
    }

    proptest! {
        #[test]
        fn verdict_antisymmetric(
            a in prop::collection::vec(0u8..20, 4..10),
            b in prop::collection::vec(0u8..20, 4..10),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let ab = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
            let ba = wilcoxon_rank_sum(&b, &a, 0.05).unwrap();
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
            prop_assert_eq!(ab.verdict, ba.verdict.swapped());
        }
    }
}
