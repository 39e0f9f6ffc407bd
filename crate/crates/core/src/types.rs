use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::QdError;

/// Random stream used everywhere in a run. ChaCha keeps sequences stable
/// across platforms and crate upgrades, which the determinism contract needs.
pub type QdRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> QdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub type IndividualId = u64;

/// Tolerance used when checking that a sampled gene sits on its grid.
pub const SAMPLE_TOLERANCE: f64 = 1e-9;

/// How gene values are drawn. Every gene lives in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Encoding {
    Continuous,
    /// Genes restricted to `{0, step, 2*step, ..., 1}`.
    Sampled { step: f64 },
}

impl Encoding {
    pub fn validate(&self) -> Result<(), QdError> {
        if let Encoding::Sampled { step } = *self {
            if !(step > 0.0 && step <= 1.0) {
                return Err(QdError::Config(format!("sample step {step} outside (0, 1]")));
            }
            let levels = (1.0 / step).round();
            if (levels * step - 1.0).abs() > SAMPLE_TOLERANCE {
                return Err(QdError::Config(format!("sample step {step} does not divide 1")));
            }
        }
        Ok(())
    }

    /// Number of intervals of the sample grid, `None` for continuous genes.
    fn intervals(&self) -> Option<u32> {
        match *self {
            Encoding::Continuous => None,
            Encoding::Sampled { step } => Some((1.0 / step).round() as u32),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        if !(0.0..=1.0).contains(&value) {
            return false;
        }
        match *self {
            Encoding::Continuous => true,
            Encoding::Sampled { step } => {
                let k = value / step;
                (k - k.round()).abs() * step <= SAMPLE_TOLERANCE
            }
        }
    }

    /// One fresh gene value, uniform over the encoding's support.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.intervals() {
            None => rng.gen::<f64>(),
            Some(n) => rng.gen_range(0..=n) as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Genotype {
    values: Vec<f64>,
    encoding: Encoding,
}

impl Genotype {
    pub fn new(values: Vec<f64>, encoding: Encoding) -> Result<Self, QdError> {
        encoding.validate()?;
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !encoding.contains(**v)) {
            return Err(QdError::Genotype(format!(
                "gene {i} = {v} is not valid under {encoding:?}"
            )));
        }
        Ok(Self { values, encoding })
    }

    /// Builds a genotype whose genes are already known to be valid.
    pub(crate) fn from_valid(values: Vec<f64>, encoding: Encoding) -> Self {
        debug_assert!(values.iter().all(|v| encoding.contains(*v)));
        Self { values, encoding }
    }

    pub fn random<R: Rng + ?Sized>(encoding: Encoding, size: usize, rng: &mut R) -> Self {
        let values = (0..size).map(|_| encoding.sample(rng)).collect();
        Self { values, encoding }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }
}

/// Position in the normalized descriptor space; coordinates are clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor(Vec<f64>);

impl Descriptor {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(
            coords
                .into_iter()
                .map(|c| if c.is_nan() { 0.0 } else { c.clamp(0.0, 1.0) })
                .collect(),
        )
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn distance(&self, other: &Descriptor) -> f64 {
        euclidean(&self.0, &other.0)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// An evaluated solution. Descriptor and fitness are fixed at construction;
/// the scores below them are caches maintained by containers and the run loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    id: IndividualId,
    parent_id: Option<IndividualId>,
    genotype: Genotype,
    descriptor: Descriptor,
    fitness: f64,
    pub novelty: f64,
    pub local_quality: u32,
    pub curiosity: f64,
}

impl Individual {
    pub fn new(
        id: IndividualId,
        parent_id: Option<IndividualId>,
        genotype: Genotype,
        descriptor: Descriptor,
        fitness: f64,
    ) -> Self {
        Self {
            id,
            parent_id,
            genotype,
            descriptor,
            fitness,
            novelty: 0.0,
            local_quality: 0,
            curiosity: 0.0,
        }
    }

    pub fn id(&self) -> IndividualId {
        self.id
    }

    pub fn parent_id(&self) -> Option<IndividualId> {
        self.parent_id
    }

    pub fn genotype(&self) -> &Genotype {
        &self.genotype
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }
}
