//! Quality indicators.

use crate::error::{Error, Result};
use crate::individual::IdealNadir;
use crate::problems::ReferenceFront;

/// Mean distance from each reference point to its nearest approximation point.
pub fn igd(reference: &ReferenceFront, approx: &[Vec<f64>]) -> Result<f64> {
    if approx.is_empty() {
        return Err(Error::UndefinedMetric("IGD of an empty approximation set".into()));
    }
    if reference.points.is_empty() {
        return Err(Error::UndefinedMetric("IGD against an empty reference front".into()));
    }
    let m = reference.dim();
    if approx.iter().any(|a| a.len() != m) {
        return Err(Error::Contract("IGD: objective counts differ".into()));
    }
    let total: f64 = reference
        .points
        .iter()
        .map(|r| approx.iter().map(|a| squared_distance(r, a)).fold(f64::INFINITY, f64::min).sqrt())
        .sum();
    Ok(total / reference.count() as f64)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exact hypervolume dominated by `approx` and bounded by `ref_point`, for two
/// or three objectives. Points that are not strictly better than the
/// reference point in every coordinate contribute nothing.
pub fn hypervolume(approx: &[Vec<f64>], ref_point: &[f64]) -> Result<f64> {
    let m = ref_point.len();
    if !(2..=3).contains(&m) {
        return Err(Error::Unsupported(format!("hypervolume for {m} objectives")));
    }
    if approx.iter().any(|a| a.len() != m) {
        return Err(Error::Contract("hypervolume: objective counts differ".into()));
    }
    let mut pts: Vec<&[f64]> =
        approx.iter().map(Vec::as_slice).filter(|p| p.iter().zip(ref_point).all(|(v, r)| v < r)).collect();
    Ok(match m {
        2 => hv2d(&mut pts, ref_point[0], ref_point[1]),
        _ => hv3d(&mut pts, ref_point),
    })
}

fn hv2d(pts: &mut [&[f64]], r1: f64, r2: f64) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut floor = r2;
    for p in pts.iter() {
        if p[1] < floor {
            area += (r1 - p[0]) * (floor - p[1]);
            floor = p[1];
        }
    }
    area
}

/// Slices along the third objective; each slab's cross-section is a 2-D
/// hypervolume of the points at or below it.
fn hv3d(pts: &mut [&[f64]], r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut volume = 0.0;
    let mut active: Vec<&[f64]> = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        active.push(pts[i]);
        let top = if i + 1 < pts.len() { pts[i + 1][2] } else { r[2] };
        let height = top - pts[i][2];
        if height > 0.0 {
            volume += hv2d(&mut active, r[0], r[1]) * height;
        }
    }
    volume
}

/// Hypervolume reference point derived from a true front.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferencePoint {
    pub point: Vec<f64>,
    /// Coordinates where the front had zero extent.
    pub degenerate: Vec<usize>,
}

/// `ideal + 1.2 * (nadir - ideal)` of the front. A coordinate with
/// `nadir == ideal` falls back to `ideal + 1.2e-6` and is flagged.
pub fn reference_point(front: &ReferenceFront) -> Result<ReferencePoint> {
    let bounds = IdealNadir::from_objectives(front.points.iter().map(Vec::as_slice))
        .ok_or_else(|| Error::UndefinedMetric("reference point of an empty front".into()))?;
    let mut degenerate = Vec::new();
    let point = bounds
        .ideal
        .iter()
        .zip(&bounds.nadir)
        .enumerate()
        .map(|(i, (&lo, &hi))| {
            if hi > lo {
                lo + 1.2 * (hi - lo)
            } else {
                degenerate.push(i);
                lo + 1.2 * 1e-6
            }
        })
        .collect();
    if !degenerate.is_empty() {
        log::warn!("reference front is degenerate in objectives {degenerate:?}");
    }
    Ok(ReferencePoint { point, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn front(points: &[[f64; 2]]) -> ReferenceFront {
        ReferenceFront::new(points.iter().map(|p| p.to_vec()).collect())
    }

    fn brute_igd(r: &[Vec<f64>], a: &[Vec<f64>]) -> f64 {
        let mut sum = 0.0;
        for p in r {
            let mut best = f64::INFINITY;
            for q in a {
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                if d < best {
                    best = d;
                }
            }
            sum += best;
        }
        sum / r.len() as f64
    }

    #[test]
    fn igd_examples() {
        let r = front(&[[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]]);
        assert_eq!(igd(&r, &r.points).unwrap(), 0.0);
        let v = igd(&front(&[[0.0, 0.0], [1.0, 1.0]]), &[vec![0.0, 0.0]]).unwrap();
        assert!((v - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
        assert_eq!(igd(&front(&[[0.0, 1.0], [1.0, 0.0]]), &[vec![0.0, 0.0]]).unwrap(), 1.0);
        assert!(matches!(igd(&r, &[]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(igd(&r, &[vec![0.0; 3]]), Err(Error::Contract(_))));
    }

    #[test]
    fn hypervolume_examples() {
        assert_eq!(hypervolume(&[vec![0.0, 0.0]], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(hypervolume(&[vec![0.5, 0.5]], &[1.0, 1.0]).unwrap(), 0.25);
        let v = hypervolume(&[vec![0.0, 0.5], vec![0.5, 0.0]], &[1.0, 1.0]).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        assert_eq!(hypervolume(&[], &[1.0, 1.0]).unwrap(), 0.0);
        // on or beyond the reference point contributes nothing
        assert_eq!(hypervolume(&[vec![1.0, 0.0], vec![0.2, 1.5]], &[1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(hypervolume(&[vec![0.0; 4]], &[1.0; 4]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn hypervolume_3d_by_hand() {
        assert!((hypervolume(&[vec![0.0, 0.0, 0.0]], &[1.0, 2.0, 3.0]).unwrap() - 6.0).abs() < 1e-12);
        // two unit-overlapping boxes: 2*0.5 - 0.25 with depth 1, plus a slab
        let pts = vec![vec![0.0, 0.5, 0.0], vec![0.5, 0.0, 0.0]];
        assert!((hypervolume(&pts, &[1.0, 1.0, 1.0]).unwrap() - 0.75).abs() < 1e-12);
        let pts = vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.0, 0.5]];
        // lower slab 0.25, upper slab full square 1 * 0.5
        assert!((hypervolume(&pts, &[1.0, 1.0, 1.0]).unwrap() - 0.625).abs() < 1e-12);
    }

    #[test]
    fn reference_point_examples() {
        let rp = reference_point(&front(&[[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])).unwrap();
        assert_eq!(rp.point, vec![1.2, 1.2]);
        assert!(rp.degenerate.is_empty());

        let rp = reference_point(&front(&[[0.5, 0.5]])).unwrap();
        assert_eq!(rp.degenerate, vec![0, 1]);
        assert!((rp.point[0] - (0.5 + 1.2e-6)).abs() < 1e-15);

        let boundary = front(&[[0.0, 1.1], [1.0, 0.1]]);
        let rp = reference_point(&boundary).unwrap();
        assert!((rp.point[0] - 1.2).abs() < 1e-12);
        assert!((rp.point[1] - 1.3).abs() < 1e-12);

        assert!(reference_point(&ReferenceFront::new(vec![])).is_err());
    }

    fn arb_points(m: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0f64..1.0, m), 1..max)
    }

    proptest! {
        #[test]
        fn igd_matches_double_loop(r in arb_points(2, 60), a in arb_points(2, 60)) {
            let fast = igd(&ReferenceFront::new(r.clone()), &a).unwrap();
            prop_assert!((fast - brute_igd(&r, &a)).abs() <= 1e-12);
        }

        #[test]
        fn igd_does_not_increase_with_reference_point(r in arb_points(2, 40), a in arb_points(2, 40), k in 0usize..40) {
            let front = ReferenceFront::new(r.clone());
            let before = igd(&front, &a).unwrap();
            let mut more = a.clone();
            more.push(r[k % r.len()].clone());
            prop_assert!(igd(&front, &more).unwrap() <= before + 1e-15);
        }

        #[test]
        fn hypervolume_monotone(a in arb_points(3, 25), extra in prop::collection::vec(0.0f64..1.0, 3)) {
            let r = [1.0, 1.0, 1.0];
            let base = hypervolume(&a, &r).unwrap();
            let mut more = a.clone();
            more.push(extra);
            prop_assert!(hypervolume(&more, &r).unwrap() >= base - 1e-12);

            // a point dominated by an existing one changes nothing
            let p = &a[0];
            let dominated: Vec<f64> = p.iter().map(|v| (v + 1.0) / 2.0).collect();
            let mut with_dominated = a.clone();
            with_dominated.push(dominated);
            prop_assert!((hypervolume(&with_dominated, &r).unwrap() - base).abs() < 1e-12);
        }

        #[test]
        fn hypervolume_2d_monotone(a in arb_points(2, 30), extra in prop::collection::vec(0.0f64..1.0, 2)) {
            let r = [1.0, 1.0];
            let base = hypervolume(&a, &r).unwrap();
            let mut more = a.clone();
            more.push(extra);
            prop_assert!(hypervolume(&more, &r).unwrap() >= base - 1e-12);
        }
    }
}
