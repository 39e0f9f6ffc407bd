//! Fixtures shared by the benchmarks.

use qd_core::config::{ArchiveConfig, GridConfig};
use qd_core::container::{ArchiveContainer, Container, GridContainer};
use qd_core::types::{rng_from_seed, Descriptor, Encoding, Genotype, Individual};
use rand::Rng;

/// `n` individuals with uniform descriptors in `dim` dimensions.
pub fn scattered(n: usize, dim: usize, seed: u64) -> Vec<Individual> {
    let mut rng = rng_from_seed(seed);
    (0..n as u64)
        .map(|id| {
            let coords = (0..dim).map(|_| rng.gen()).collect();
            Individual::new(
                id,
                None,
                Genotype::new(vec![], Encoding::Continuous).unwrap(),
                Descriptor::new(coords),
                -rng.gen::<f64>(),
            )
        })
        .collect()
}

/// The arm-task archive filled from `offers` random individuals.
pub fn filled_archive(offers: usize) -> ArchiveContainer {
    let mut a = ArchiveContainer::new(ArchiveConfig { l: 0.01, epsilon: 0.1, k_nn: 15 }, 2, 1.0);
    for i in scattered(offers, 2, 1) {
        a.add(i).unwrap();
    }
    a
}

/// The arm-task grid filled from `offers` random individuals.
pub fn filled_grid(offers: usize) -> GridContainer {
    let mut g = GridContainer::new(GridConfig { resolution: vec![100, 100], subgrid_depth: 3 });
    for i in scattered(offers, 2, 2) {
        g.add(i).unwrap();
    }
    g
}
