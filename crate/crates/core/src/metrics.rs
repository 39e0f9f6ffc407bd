//! Collection quality metrics and replicate summaries.

use crate::container::Container;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub batch: usize,
    pub evals: u64,
    pub size: usize,
    /// Best raw fitness, `None` for an empty collection.
    pub max_quality: Option<f64>,
    /// Sum of `fitness + quality_offset` over all members.
    pub total_quality: f64,
    /// Sum of cached novelty; only reported for unstructured collections.
    pub total_novelty: Option<f64>,
}

pub fn compute_metrics<C: Container + ?Sized>(
    container: &C,
    quality_offset: f64,
    batch: usize,
    evals: u64,
) -> MetricsRow {
    let members = container.members();
    let max_quality = members
        .iter()
        .map(|m| m.fitness())
        .fold(None, |acc: Option<f64>, f| Some(acc.map_or(f, |a| a.max(f))));
    let total_quality = members.iter().map(|m| m.fitness() + quality_offset).sum();
    let total_novelty = (container.reports_novelty() && !members.is_empty())
        .then(|| members.iter().map(|m| m.novelty).sum());
    MetricsRow {
        batch,
        evals,
        size: members.len(),
        max_quality,
        total_quality,
        total_novelty,
    }
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman and Fan type 7). `sorted` must be ascending and non-empty.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    /// `None` when no value is available.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        Some(Self {
            q1: quantile_type7(&v, 0.25),
            median: quantile_type7(&v, 0.5),
            q3: quantile_type7(&v, 0.75),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub batch: usize,
    pub evals: u64,
    pub size: Option<Quartiles>,
    pub max_quality: Option<Quartiles>,
    pub total_quality: Option<Quartiles>,
    pub total_novelty: Option<Quartiles>,
}

/// Per logged batch, the quartiles of each metric across replicates. Rows
/// are aligned by position; traces shorter than the longest simply stop
/// contributing.
pub fn summarize(traces: &[Vec<MetricsRow>]) -> Vec<SummaryRow> {
    let rows = traces.iter().map(Vec::len).max().unwrap_or(0);
    (0..rows)
        .map(|r| {
            let at: Vec<&MetricsRow> = traces.iter().filter_map(|t| t.get(r)).collect();
            SummaryRow {
                batch: at[0].batch,
                evals: at[0].evals,
                size: Quartiles::of(at.iter().map(|m| m.size as f64)),
                max_quality: Quartiles::of(at.iter().filter_map(|m| m.max_quality)),
                total_quality: Quartiles::of(at.iter().map(|m| m.total_quality)),
                total_novelty: Quartiles::of(at.iter().filter_map(|m| m.total_novelty)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ArchiveConfig, GridConfig};
    use crate::container::{ArchiveContainer, GridContainer};
    use crate::types::{Descriptor, Encoding, Genotype, Individual};

    fn ind(id: u64, coords: &[f64], fitness: f64) -> Individual {
        Individual::new(
            id,
            None,
            Genotype::new(vec![], Encoding::Continuous).unwrap(),
            Descriptor::new(coords.to_vec()),
            fitness,
        )
    }

    #[test]
    fn empty_container() {
        let g = GridContainer::new(GridConfig {
            resolution: vec![10, 10],
            subgrid_depth: 1,
        });
        let m = compute_metrics(&g, 1.0, 0, 0);
        assert_eq!((m.size, m.max_quality, m.total_quality, m.total_novelty), (0, None, 0.0, None));
    }

    #[test]
    fn two_members_with_offset() {
        let mut g = GridContainer::new(GridConfig {
            resolution: vec![10, 10],
            subgrid_depth: 1,
        });
        g.add(ind(1, &[0.1, 0.1], -0.1)).unwrap();
        g.add(ind(2, &[0.9, 0.9], -0.2)).unwrap();
        let m = compute_metrics(&g, 1.0, 3, 600);
        assert_eq!(m.size, 2);
        assert_eq!(m.max_quality, Some(-0.1));
        assert!((m.total_quality - 1.7).abs() < 1e-12);
        assert_eq!(m.total_novelty, None);
    }

    #[test]
    fn archive_reports_novelty_sum() {
        let mut a = ArchiveContainer::new(
            ArchiveConfig {
                l: 0.01,
                epsilon: 0.1,
                k_nn: 15,
            },
            2,
            1.0,
        );
        a.add(ind(1, &[0.0, 0.0], -0.1)).unwrap();
        a.add(ind(2, &[0.3, 0.4], -0.1)).unwrap();
        a.update();
        let m = compute_metrics(&a, 1.0, 1, 1);
        assert!((m.total_novelty.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn type7_quartiles_by_hand() {
        // n = 4: h = 0.75, 1.5, 2.25.
        let q = Quartiles::of([4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(q.q1, 1.75);
        assert_eq!(q.median, 2.5);
        assert_eq!(q.q3, 3.25);
        let c = Quartiles::of([7.0; 5]).unwrap();
        assert_eq!((c.q1, c.median, c.q3), (7.0, 7.0, 7.0));
        let one = Quartiles::of([2.5]).unwrap();
        assert_eq!((one.q1, one.median, one.q3), (2.5, 2.5, 2.5));
        assert!(Quartiles::of(std::iter::empty()).is_none());
    }
}
