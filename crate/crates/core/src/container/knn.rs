//! Nearest-neighbour queries over container members.
//!
//! [`nearest_exhaustive`] is the reference scan. [`BucketIndex`] hashes the
//! unit hypercube into equal buckets and searches outward ring by ring; it
//! returns exactly the same neighbours in the same order, because both
//! order candidates by `(distance, id)` and use the same distance function.

use std::cmp::Ordering;

use crate::types::{euclidean, Individual, IndividualId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Position of the member in the container's member list.
    pub slot: usize,
    pub id: IndividualId,
    pub distance: f64,
}

fn by_distance_then_id(a: &Neighbor, b: &Neighbor) -> Ordering {
    a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id))
}

/// The `k` members closest to `query`, skipping the member whose id is
/// `exclude`, sorted by distance with ties broken by id.
pub fn nearest_exhaustive(
    members: &[Individual],
    query: &[f64],
    k: usize,
    exclude: Option<IndividualId>,
) -> Vec<Neighbor> {
    let mut all: Vec<Neighbor> = members
        .iter()
        .enumerate()
        .filter(|(_, m)| Some(m.id()) != exclude)
        .map(|(slot, m)| Neighbor {
            slot,
            id: m.id(),
            distance: euclidean(m.descriptor().coords(), query),
        })
        .collect();
    all.sort_by(by_distance_then_id);
    all.truncate(k);
    all
}

/// Buckets target roughly this many cells whatever the dimension.
const TARGET_BUCKETS: f64 = 4096.0;

#[derive(Debug, Clone)]
pub struct BucketIndex {
    dim: usize,
    per_dim: usize,
    width: f64,
    buckets: Vec<Vec<usize>>,
}

impl BucketIndex {
    pub fn new(dim: usize) -> Self {
        let per_dim = (TARGET_BUCKETS.powf(1.0 / dim.max(1) as f64).floor() as usize).max(1);
        let total = per_dim.pow(dim as u32);
        Self {
            dim,
            per_dim,
            width: 1.0 / per_dim as f64,
            buckets: vec![Vec::new(); total],
        }
    }

    fn coord_bucket(&self, c: f64) -> usize {
        ((c * self.per_dim as f64).floor().max(0.0) as usize).min(self.per_dim - 1)
    }

    fn flat(&self, cell: &[usize]) -> usize {
        cell.iter().fold(0, |acc, &c| acc * self.per_dim + c)
    }

    fn bucket_of(&self, coords: &[f64]) -> usize {
        coords
            .iter()
            .fold(0, |acc, &c| acc * self.per_dim + self.coord_bucket(c))
    }

    pub fn insert(&mut self, slot: usize, coords: &[f64]) {
        let b = self.bucket_of(coords);
        self.buckets[b].push(slot);
    }

    pub fn remove(&mut self, slot: usize, coords: &[f64]) {
        let b = self.bucket_of(coords);
        let bucket = &mut self.buckets[b];
        if let Some(pos) = bucket.iter().position(|&s| s == slot) {
            bucket.swap_remove(pos);
        }
    }

    pub fn clear(&mut self) {
        self.buckets.iter_mut().for_each(Vec::clear);
    }

    /// Same contract as [`nearest_exhaustive`].
    pub fn nearest(
        &self,
        members: &[Individual],
        query: &[f64],
        k: usize,
        exclude: Option<IndividualId>,
    ) -> Vec<Neighbor> {
        debug_assert_eq!(query.len(), self.dim);
        if k == 0 || members.is_empty() {
            return Vec::new();
        }
        let center: Vec<usize> = query.iter().map(|&c| self.coord_bucket(c)).collect();
        let n = self.per_dim;
        let mut found: Vec<Neighbor> = Vec::new();
        let mut lo = vec![0usize; self.dim];
        let mut hi = vec![0usize; self.dim];
        let mut cell = vec![0usize; self.dim];

        for ring in 0..n {
            let mut covers_all = true;
            for d in 0..self.dim {
                lo[d] = center[d].saturating_sub(ring);
                hi[d] = (center[d] + ring).min(n - 1);
                covers_all &= lo[d] == 0 && hi[d] == n - 1;
            }
            // Visit the clamped block, keeping only cells on the ring's shell.
            cell.copy_from_slice(&lo);
            'cells: loop {
                let on_shell = ring == 0
                    || cell
                        .iter()
                        .zip(&center)
                        .any(|(&c, &m)| c.abs_diff(m) == ring);
                if on_shell {
                    for &slot in &self.buckets[self.flat(&cell)] {
                        let m = &members[slot];
                        if Some(m.id()) == exclude {
                            continue;
                        }
                        found.push(Neighbor {
                            slot,
                            id: m.id(),
                            distance: euclidean(m.descriptor().coords(), query),
                        });
                    }
                }
                for d in (0..self.dim).rev() {
                    if cell[d] < hi[d] {
                        cell[d] += 1;
                        continue 'cells;
                    }
                    cell[d] = lo[d];
                }
                break;
            }

            found.sort_by(by_distance_then_id);
            found.truncate(k);
            if covers_all {
                break;
            }
            if found.len() == k {
                // Anything not visited yet lies outside the block, at least
                // `bound` away from the query.
                let mut bound = f64::INFINITY;
                for d in 0..self.dim {
                    if lo[d] > 0 {
                        bound = bound.min(query[d] - lo[d] as f64 * self.width);
                    }
                    if hi[d] < n - 1 {
                        bound = bound.min((hi[d] + 1) as f64 * self.width - query[d]);
                    }
                }
                if found[k - 1].distance < bound {
                    break;
                }
            }
        }
        found
    }
}
