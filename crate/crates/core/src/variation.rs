//! Mutation operators. Crossover is not used.

use rand::Rng;

use crate::config::{MutationConfig, MutationKind};
use crate::types::Genotype;

/// Polynomial mutation of one gene on `[0, 1]`, clipped to the bounds.
pub fn polynomial_gene<R: Rng + ?Sized>(value: f64, eta: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    let power = 1.0 / (eta + 1.0);
    let delta = if u < 0.5 {
        let xy = 1.0 - value;
        let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
        val.powf(power) - 1.0
    } else {
        let xy = value;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(power)
    };
    (value + delta).clamp(0.0, 1.0)
}

/// Copies `parent` and mutates each gene independently with probability
/// `per_gene_rate`. Untouched genes are bit-identical to the parent's.
pub fn mutate<R: Rng + ?Sized>(parent: &Genotype, cfg: &MutationConfig, rng: &mut R) -> Genotype {
    let encoding = parent.encoding();
    let values = parent
        .values()
        .iter()
        .map(|&v| {
            if rng.gen::<f64>() >= cfg.per_gene_rate {
                return v;
            }
            match cfg.kind {
                MutationKind::Polynomial { eta } => polynomial_gene(v, eta, rng),
                MutationKind::Resample => encoding.sample(rng),
            }
        })
        .collect();
    Genotype::from_valid(values, encoding)
}
