use std::collections::HashMap;

use crate::config::GridConfig;
use crate::container::{AddOutcome, Container, RejectReason};
use crate::error::QdError;
use crate::types::{Individual, IndividualId};

/// Cell index of a descriptor: `floor(coord * resolution)`, clamped to the grid.
pub fn discretize(coords: &[f64], resolution: &[usize]) -> Vec<usize> {
    coords
        .iter()
        .zip(resolution)
        .map(|(&c, &r)| {
            let c = if c.is_nan() { 0.0 } else { c.clamp(0.0, 1.0) };
            ((c * r as f64).floor() as usize).min(r - 1)
        })
        .collect()
}

/// MAP-Elites style grid: one elite per cell.
#[derive(Debug, Clone)]
pub struct GridContainer {
    config: GridConfig,
    members: Vec<Individual>,
    /// Flat cell index -> slot in `members`.
    cells: Vec<Option<usize>>,
    by_id: HashMap<IndividualId, usize>,
}

impl GridContainer {
    pub fn new(config: GridConfig) -> Self {
        assert!(config.resolution.iter().all(|&r| r >= 1), "grid resolution must be >= 1");
        let total = config.resolution.iter().product();
        Self {
            config,
            members: Vec::new(),
            cells: vec![None; total],
            by_id: HashMap::new(),
        }
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn cell_of(&self, coords: &[f64]) -> Vec<usize> {
        discretize(coords, &self.config.resolution)
    }

    fn flat(&self, cell: &[usize]) -> usize {
        cell.iter()
            .zip(&self.config.resolution)
            .fold(0, |acc, (&c, &r)| acc * r + c)
    }

    pub fn occupant(&self, cell: &[usize]) -> Option<&Individual> {
        self.cells[self.flat(cell)].map(|slot| &self.members[slot])
    }

    /// Calls `visit` with the occupant of every filled cell in the sub-grid
    /// around `cell` and returns `(filled, in_bounds)` cell counts.
    fn scan_subgrid(&self, cell: &[usize], mut visit: impl FnMut(&Individual)) -> (usize, usize) {
        let k = self.config.subgrid_depth;
        let res = &self.config.resolution;
        let lo: Vec<usize> = cell.iter().map(|&c| c.saturating_sub(k)).collect();
        let hi: Vec<usize> = cell.iter().zip(res).map(|(&c, &r)| (c + k).min(r - 1)).collect();
        let total = lo.iter().zip(&hi).map(|(l, h)| h - l + 1).product();
        let mut filled = 0;
        let mut cur = lo.clone();
        'cells: loop {
            if let Some(slot) = self.cells[self.flat(&cur)] {
                filled += 1;
                visit(&self.members[slot]);
            }
            for d in (0..cur.len()).rev() {
                if cur[d] < hi[d] {
                    cur[d] += 1;
                    continue 'cells;
                }
                cur[d] = lo[d];
            }
            break;
        }
        (filled, total)
    }

    /// `1 - density` of filled cells in the `±subgrid_depth` neighbourhood,
    /// truncated at the grid borders. Higher is more novel.
    pub fn novelty(&self, coords: &[f64]) -> f64 {
        let cell = self.cell_of(coords);
        let (filled, total) = self.scan_subgrid(&cell, |_| {});
        1.0 - filled as f64 / total as f64
    }

    /// Number of elites in the neighbourhood, other than `indiv` itself, whose
    /// fitness is strictly below `indiv`'s.
    pub fn local_quality(&self, indiv: &Individual) -> u32 {
        let cell = self.cell_of(indiv.descriptor().coords());
        let mut worse = 0;
        self.scan_subgrid(&cell, |m| {
            if m.id() != indiv.id() && m.fitness() < indiv.fitness() {
                worse += 1;
            }
        });
        worse
    }

    /// Cell index vector of every member, in member order.
    pub fn member_cells(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.members
            .iter()
            .map(|m| self.cell_of(m.descriptor().coords()))
    }
}

impl Container for GridContainer {
    fn add(&mut self, indiv: Individual) -> Result<AddOutcome, QdError> {
        let dim = self.config.resolution.len();
        if indiv.descriptor().dim() != dim {
            return Err(QdError::DescriptorDimension {
                expected: dim,
                got: indiv.descriptor().dim(),
            });
        }
        let flat = self.flat(&self.cell_of(indiv.descriptor().coords()));
        match self.cells[flat] {
            None => {
                let slot = self.members.len();
                self.by_id.insert(indiv.id(), slot);
                self.members.push(indiv);
                self.cells[flat] = Some(slot);
                Ok(AddOutcome::AddedNew)
            }
            Some(slot) if self.members[slot].fitness() < indiv.fitness() => {
                let evicted = self.members[slot].id();
                self.by_id.remove(&evicted);
                self.by_id.insert(indiv.id(), slot);
                self.members[slot] = indiv;
                Ok(AddOutcome::Replaced(evicted))
            }
            Some(_) => Ok(AddOutcome::Rejected(RejectReason::NotBetter)),
        }
    }

    fn update(&mut self) {
        let scores: Vec<(f64, u32)> = self
            .members
            .iter()
            .map(|m| (self.novelty(m.descriptor().coords()), self.local_quality(m)))
            .collect();
        for (m, (n, q)) in self.members.iter_mut().zip(scores) {
            m.novelty = n;
            m.local_quality = q;
        }
    }

    fn members(&self) -> &[Individual] {
        &self.members
    }

    fn get_mut(&mut self, id: IndividualId) -> Option<&mut Individual> {
        let slot = *self.by_id.get(&id)?;
        Some(&mut self.members[slot])
    }

    fn get(&self, id: IndividualId) -> Option<&Individual> {
        self.by_id.get(&id).map(|&slot| &self.members[slot])
    }

    fn novelty_of(&self, indiv: &Individual) -> f64 {
        self.novelty(indiv.descriptor().coords())
    }

    fn local_quality_of(&self, indiv: &Individual) -> u32 {
        self.local_quality(indiv)
    }

    fn reports_novelty(&self) -> bool {
        false
    }

    fn cell_label(&self, indiv: &Individual) -> Option<String> {
        let cell = self.cell_of(indiv.descriptor().coords());
        Some(
            cell.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(":"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Descriptor, Encoding, Genotype};

    fn ind(id: u64, coords: &[f64], fitness: f64) -> Individual {
        Individual::new(
            id,
            None,
            Genotype::new(vec![], Encoding::Continuous).unwrap(),
            Descriptor::new(coords.to_vec()),
            fitness,
        )
    }

    fn grid(res: usize, k: usize) -> GridContainer {
        GridContainer::new(GridConfig {
            resolution: vec![res, res],
            subgrid_depth: k,
        })
    }

    #[test]
    fn discretize_boundaries() {
        assert_eq!(discretize(&[0.0], &[100]), vec![0]);
        assert_eq!(discretize(&[1.0], &[100]), vec![99]);
        assert_eq!(discretize(&[0.955], &[100]), vec![95]);
        assert_eq!(discretize(&[-0.3, 1.4], &[10, 10]), vec![0, 9]);
    }

    #[test]
    fn add_replace_reject() {
        let mut g = grid(100, 3);
        assert_eq!(g.add(ind(1, &[0.5, 0.5], -0.2)).unwrap(), AddOutcome::AddedNew);
        assert_eq!(g.add(ind(2, &[0.501, 0.502], -0.1)).unwrap(), AddOutcome::Replaced(1));
        assert_eq!(
            g.add(ind(3, &[0.505, 0.505], -0.1)).unwrap(),
            AddOutcome::Rejected(RejectReason::NotBetter)
        );
        assert_eq!(g.len(), 1);
        assert_eq!(g.members()[0].id(), 2);
        assert!(g.get(1).is_none());
        assert!(g.get(2).is_some());
    }

    #[test]
    fn novelty_extremes() {
        let mut g = grid(10, 1);
        assert_eq!(g.novelty(&[0.55, 0.55]), 1.0);
        let mut id = 0;
        for x in 4..=6 {
            for y in 4..=6 {
                id += 1;
                g.add(ind(id, &[x as f64 / 10.0 + 0.05, y as f64 / 10.0 + 0.05], 0.0))
                    .unwrap();
            }
        }
        assert_eq!(g.novelty(&[0.55, 0.55]), 0.0);
    }

    #[test]
    fn novelty_interior_partial() {
        // 24 of the 49 cells around an interior cell filled, k = 3.
        let mut g = grid(100, 3);
        let mut n = 0;
        'fill: for dx in -3i32..=3 {
            for dy in -3i32..=3 {
                if n == 24 {
                    break 'fill;
                }
                let (x, y) = (50 + dx, 50 + dy);
                g.add(ind(n, &[x as f64 / 100.0 + 0.005, y as f64 / 100.0 + 0.005], 0.0))
                    .unwrap();
                n += 1;
            }
        }
        let expected = 1.0 - 24.0 / 49.0;
        assert!((g.novelty(&[0.505, 0.505]) - expected).abs() < 1e-15);
        assert!((expected - 0.5102).abs() < 1e-4);
    }

    #[test]
    fn novelty_truncates_at_corner() {
        // Corner cell with k = 1 sees a 2x2 block.
        let mut g = grid(10, 1);
        g.add(ind(1, &[0.15, 0.05], 0.0)).unwrap();
        assert_eq!(g.novelty(&[0.0, 0.0]), 0.75);
    }

    #[test]
    fn update_is_idempotent_and_monotone() {
        let mut g = grid(10, 1);
        g.add(ind(1, &[0.55, 0.55], -0.3)).unwrap();
        g.add(ind(2, &[0.65, 0.55], -0.1)).unwrap();
        g.update();
        let before: Vec<f64> = g.members().iter().map(|m| m.novelty).collect();
        g.update();
        let again: Vec<f64> = g.members().iter().map(|m| m.novelty).collect();
        assert_eq!(before, again);
        assert_eq!(g.members()[1].local_quality, 1);
        assert_eq!(g.members()[0].local_quality, 0);
        g.add(ind(3, &[0.55, 0.65], 0.0)).unwrap();
        g.update();
        for (b, m) in before.iter().zip(g.members()) {
            assert!(m.novelty <= *b);
        }
    }

    #[test]
    fn wrong_dimension_is_an_error() {
        let mut g = grid(10, 1);
        assert!(g.add(ind(1, &[0.5], 0.0)).is_err());
    }
}
