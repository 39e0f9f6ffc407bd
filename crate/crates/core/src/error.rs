use thiserror::Error;

use crate::types::IndividualId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QdError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid genotype: {0}")]
    Genotype(String),

    /// Exclusive epsilon-dominance is only defined for strictly positive quality.
    #[error("quality must be strictly positive, got {0} (is the task quality offset large enough?)")]
    NonPositiveQuality(f64),

    #[error("task evaluation failed in batch {batch} for individual {id}: {message}")]
    Evaluation {
        batch: usize,
        id: IndividualId,
        message: String,
    },

    #[error("descriptor has {got} dimensions, container expects {expected}")]
    DescriptorDimension { expected: usize, got: usize },

    #[error("cannot render a {0}-dimensional collection, only 2-D descriptors can be drawn")]
    RenderDimension(usize),

    #[error("malformed {what}: {message}")]
    Parse { what: String, message: String },
}
