use crate::error::QdError;

/// Novelty and quality of one contender. Both are maximized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoveltyQuality {
    pub novelty: f64,
    pub quality: f64,
}

impl NoveltyQuality {
    pub fn new(novelty: f64, quality: f64) -> Self {
        Self { novelty, quality }
    }
}

/// Exclusive epsilon-dominance of `x1` over `x2`: `x1` may lose up to a
/// fraction `epsilon` on one objective only if it gains at least as much on
/// the other. Quality must be strictly positive for both contenders.
///
/// The three conditions, evaluated literally:
/// `N1 >= (1-e)*N2`, `Q1 >= (1-e)*Q2` and `(N1-N2)*Q2 > -(Q1-Q2)*N2`.
pub fn exclusive_eps_dominates(
    x1: NoveltyQuality,
    x2: NoveltyQuality,
    epsilon: f64,
) -> Result<bool, QdError> {
    for q in [x1.quality, x2.quality] {
        if q.is_nan() || q <= 0.0 {
            return Err(QdError::NonPositiveQuality(q));
        }
    }
    let (n1, q1, n2, q2) = (x1.novelty, x1.quality, x2.novelty, x2.quality);
    Ok(n1 >= (1.0 - epsilon) * n2
        && q1 >= (1.0 - epsilon) * q2
        && (n1 - n2) * q2 > -(q1 - q2) * n2)
}
