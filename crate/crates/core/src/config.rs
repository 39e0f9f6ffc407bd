//! Run configuration and the per-task parameter blocks.

use serde::{Deserialize, Serialize};

use crate::error::QdError;
use crate::tasks::{Task, TaskKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Number of cells along each descriptor dimension.
    pub resolution: Vec<usize>,
    /// Half-width, in cells, of the neighbourhood used for novelty.
    pub subgrid_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveConfig {
    /// Minimum descriptor distance between two members.
    pub l: f64,
    pub epsilon: f64,
    pub k_nn: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContainerConfig {
    Grid(GridConfig),
    Archive(ArchiveConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainerKind {
    Grid,
    Archive,
}

impl ContainerConfig {
    pub fn kind(&self) -> ContainerKind {
        match self {
            ContainerConfig::Grid(_) => ContainerKind::Grid,
            ContainerConfig::Archive(_) => ContainerKind::Archive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Score {
    Fitness,
    Novelty,
    Curiosity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    NoSelection,
    Uniform,
    ScoreProportionate,
    Population,
    Pareto,
}

impl SelectorKind {
    pub fn needs_score(self) -> bool {
        matches!(self, SelectorKind::ScoreProportionate | SelectorKind::Population)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub kind: SelectorKind,
    pub score: Option<Score>,
    pub tournament_size: usize,
}

impl SelectorConfig {
    pub const DEFAULT_TOURNAMENT: usize = 2;

    fn of(kind: SelectorKind, score: Option<Score>) -> Self {
        Self {
            kind,
            score,
            tournament_size: Self::DEFAULT_TOURNAMENT,
        }
    }

    pub fn no_selection() -> Self {
        Self::of(SelectorKind::NoSelection, None)
    }

    pub fn uniform() -> Self {
        Self::of(SelectorKind::Uniform, None)
    }

    pub fn score(score: Score) -> Self {
        Self::of(SelectorKind::ScoreProportionate, Some(score))
    }

    pub fn population(score: Score) -> Self {
        Self::of(SelectorKind::Population, Some(score))
    }

    pub fn pareto() -> Self {
        Self::of(SelectorKind::Pareto, None)
    }

    /// Whether selection reads the scores a container caches on refresh.
    pub fn reads_cached_scores(&self) -> bool {
        self.kind == SelectorKind::ScoreProportionate && self.score == Some(Score::Novelty)
    }

    pub fn validate(&self) -> Result<(), QdError> {
        match (self.kind.needs_score(), self.score) {
            (true, None) => {
                return Err(QdError::Config(format!("selector {:?} needs a score", self.kind)))
            }
            (false, Some(s)) => {
                return Err(QdError::Config(format!(
                    "score {s:?} only applies to score-proportionate or population selectors"
                )))
            }
            _ => {}
        }
        if self.tournament_size < 2 {
            return Err(QdError::Config("tournament size must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutationKind {
    /// Polynomial mutation with distribution index `eta`.
    Polynomial { eta: f64 },
    /// Replace the gene by a fresh draw from its encoding.
    Resample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    pub kind: MutationKind,
    pub per_gene_rate: f64,
}

impl MutationConfig {
    pub const DEFAULT_ETA: f64 = 10.0;

    pub fn validate(&self) -> Result<(), QdError> {
        if !(self.per_gene_rate > 0.0 && self.per_gene_rate <= 1.0) {
            return Err(QdError::Config(format!(
                "mutation rate {} outside (0, 1]",
                self.per_gene_rate
            )));
        }
        if let MutationKind::Polynomial { eta } = self.kind {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(QdError::Config(format!("eta must be positive, got {eta}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub batch_size: usize,
    pub iterations: usize,
    pub reward: f64,
    pub penalty: f64,
    pub container: ContainerConfig,
    pub selector: SelectorConfig,
    pub mutation: MutationConfig,
    pub seed: u64,
    pub log_interval: usize,
}

impl RunConfig {
    pub const DEFAULT_BATCH: usize = 200;
    pub const DEFAULT_ITERATIONS: usize = 1000;
    pub const DEFAULT_REWARD: f64 = 1.0;
    pub const DEFAULT_PENALTY: f64 = 0.5;
    pub const DEFAULT_LOG_INTERVAL: usize = 10;

    /// Defaults for `task` with the given container type, uniform selection.
    pub fn for_task(task: TaskKind, container: ContainerKind) -> Self {
        let p = task.parameters();
        Self {
            batch_size: Self::DEFAULT_BATCH,
            iterations: Self::DEFAULT_ITERATIONS,
            reward: Self::DEFAULT_REWARD,
            penalty: Self::DEFAULT_PENALTY,
            container: match container {
                ContainerKind::Grid => ContainerConfig::Grid(p.grid()),
                ContainerKind::Archive => ContainerConfig::Archive(p.archive()),
            },
            selector: SelectorConfig::uniform(),
            mutation: p.mutation,
            seed: 0,
            log_interval: Self::DEFAULT_LOG_INTERVAL,
        }
    }

    pub fn with_selector(mut self, selector: SelectorConfig) -> Self {
        self.selector = selector;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_log_interval(mut self, log_interval: usize) -> Self {
        self.log_interval = log_interval;
        self
    }

    pub fn validate(&self, task: &dyn Task) -> Result<(), QdError> {
        if self.batch_size < 1 {
            return Err(QdError::Config("batch size must be at least 1".into()));
        }
        if self.iterations < 1 {
            return Err(QdError::Config("iterations must be at least 1".into()));
        }
        if self.log_interval < 1 {
            return Err(QdError::Config("log interval must be at least 1".into()));
        }
        if !(self.reward >= 0.0 && self.penalty >= 0.0) {
            return Err(QdError::Config("reward and penalty must be non-negative".into()));
        }
        self.selector.validate()?;
        self.mutation.validate()?;
        task.encoding().validate()?;
        if let (MutationKind::Polynomial { .. }, crate::types::Encoding::Sampled { .. }) =
            (self.mutation.kind, task.encoding())
        {
            return Err(QdError::Config(format!(
                "polynomial mutation would move genes of task {} off their sample grid",
                task.name()
            )));
        }
        match &self.container {
            ContainerConfig::Grid(g) => {
                if g.resolution.len() != task.descriptor_size() {
                    return Err(QdError::DescriptorDimension {
                        expected: task.descriptor_size(),
                        got: g.resolution.len(),
                    });
                }
                if g.resolution.iter().any(|&r| r < 1) {
                    return Err(QdError::Config("grid resolution must be at least 1".into()));
                }
            }
            ContainerConfig::Archive(a) => {
                if a.l.is_nan() || a.l <= 0.0 {
                    return Err(QdError::Config(format!("archive l must be positive, got {}", a.l)));
                }
                if !(0.0..1.0).contains(&a.epsilon) {
                    return Err(QdError::Config(format!("epsilon {} outside [0, 1)", a.epsilon)));
                }
                if a.k_nn < 1 {
                    return Err(QdError::Config("k must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// The parameter block a task ships with: mutation operator, grid and
/// archive settings, and the novelty threshold of the NSLC baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskParameters {
    pub mutation: MutationConfig,
    pub grid_resolution: Vec<usize>,
    pub subgrid_depth: usize,
    pub l: f64,
    pub epsilon: f64,
    pub k_nn: usize,
    pub rho_init: f64,
}

impl TaskParameters {
    pub fn grid(&self) -> GridConfig {
        GridConfig {
            resolution: self.grid_resolution.clone(),
            subgrid_depth: self.subgrid_depth,
        }
    }

    pub fn archive(&self) -> ArchiveConfig {
        ArchiveConfig {
            l: self.l,
            epsilon: self.epsilon,
            k_nn: self.k_nn,
        }
    }
}
