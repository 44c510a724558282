//! Feasible non-dominated archive maintenance.

use crate::individual::{dominates, Individual};

/// Keeps the feasible, non-dominated, distinct-objective members of
/// `archive ∪ population`. Above `capacity`, members with the largest
/// crowding distance are kept (ties to the earlier member). Survivors keep
/// their relative order.
pub fn nd_select(archive: &[Individual], population: &[Individual], capacity: usize) -> Vec<Individual> {
    let mut candidates: Vec<&Individual> = Vec::new();
    for ind in archive.iter().chain(population) {
        if ind.is_feasible() && !candidates.iter().any(|c| c.f() == ind.f()) {
            candidates.push(ind);
        }
    }
    let front: Vec<&Individual> =
        candidates.iter().filter(|a| !candidates.iter().any(|b| dominates(b.f(), a.f()))).copied().collect();
    if front.len() <= capacity {
        return front.into_iter().cloned().collect();
    }
    let objectives: Vec<&[f64]> = front.iter().map(|i| i.f()).collect();
    let crowding = crowding_distances(&objectives);
    let mut order: Vec<usize> = (0..front.len()).collect();
    order.sort_by(|&a, &b| crowding[b].total_cmp(&crowding[a]).then(a.cmp(&b)));
    order.truncate(capacity);
    order.sort_unstable();
    order.into_iter().map(|i| front[i].clone()).collect()
}

/// Crowding distance of every point within its own set. Boundary points in
/// any objective get infinity.
pub fn crowding_distances(points: &[&[f64]]) -> Vec<f64> {
    let n = points.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let m = points[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    #[allow(clippy::needless_range_loop)]
    for obj in 0..m {
        order.sort_by(|&a, &b| points[a][obj].total_cmp(&points[b][obj]).then(a.cmp(&b)));
        let lo = points[order[0]][obj];
        let hi = points[order[n - 1]][obj];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..n.saturating_sub(1) {
            let gap = points[order[w + 1]][obj] - points[order[w - 1]][obj];
            dist[order[w]] += gap / range;
        }
    }
    dist
}

/// True when every member is feasible and none dominates another.
pub fn is_valid_archive(members: &[Individual]) -> bool {
    members.iter().all(Individual::is_feasible)
        && members.iter().all(|a| !members.iter().any(|b| dominates(b.f(), a.f())))
}
