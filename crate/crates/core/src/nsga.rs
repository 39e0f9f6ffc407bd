//! Fast non-dominated sorting and crowding distance, all objectives maximized.

use std::cmp::Ordering;

/// `a` dominates `b`: no worse on every objective, strictly better on one.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

/// Partitions point indices into fronts; front 0 is non-dominated. Indices
/// within a front are ascending.
pub fn non_dominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (same order as `front`).
/// Boundary points get infinity; each objective is normalized by its range
/// within the front.
#[allow(clippy::needless_range_loop)]
pub fn crowding_distance(points: &[Vec<f64>], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut distance = vec![0.0; m];
    if m == 0 {
        return distance;
    }
    let objectives = points[front[0]].len();
    let mut order: Vec<usize> = (0..m).collect();
    for obj in 0..objectives {
        order.sort_by(|&a, &b| {
            points[front[a]][obj]
                .total_cmp(&points[front[b]][obj])
                .then(a.cmp(&b))
        });
        let lo = points[front[order[0]]][obj];
        let hi = points[front[order[m - 1]]][obj];
        distance[order[0]] = f64::INFINITY;
        distance[order[m - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..m.saturating_sub(1) {
            let gap = points[front[order[w + 1]]][obj] - points[front[order[w - 1]]][obj];
            distance[order[w]] += gap / range;
        }
    }
    distance
}

/// NSGA-II survivor selection: whole fronts while they fit, then the least
/// crowded members of the first front that overflows. `tie_key` orders
/// equally crowded points (lower first). Returns `count` indices.
pub fn select(points: &[Vec<f64>], tie_key: &[u64], count: usize) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(count);
    for front in non_dominated_sort(points) {
        let room = count - chosen.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            chosen.extend_from_slice(&front);
            continue;
        }
        let crowd = crowding_distance(points, &front);
        let mut ranked: Vec<usize> = (0..front.len()).collect();
        ranked.sort_by(|&a, &b| match crowd[b].total_cmp(&crowd[a]) {
            Ordering::Equal => tie_key[front[a]].cmp(&tie_key[front[b]]),
            other => other,
        });
        chosen.extend(ranked.into_iter().take(room).map(|r| front[r]));
        break;
    }
    chosen
}
