//! Containers gather the evolving collection.

mod archive;
mod dominance;
mod grid;
pub mod knn;

pub use archive::ArchiveContainer;
pub use dominance::{exclusive_eps_dominates, NoveltyQuality};
pub use grid::{discretize, GridContainer};

use crate::config::ContainerConfig;
use crate::error::QdError;
use crate::types::{Individual, IndividualId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// The target cell holds an elite at least as fit.
    NotBetter,
    /// The candidate is within `l` of two or more archive members.
    TooClose,
    /// The candidate does not exclusively epsilon-dominate its nearest member.
    NotDominating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    AddedNew,
    Replaced(IndividualId),
    Rejected(RejectReason),
}

impl AddOutcome {
    pub fn accepted(&self) -> bool {
        !matches!(self, AddOutcome::Rejected(_))
    }
}

/// The collection an algorithm builds. Containers own their members; the
/// run loop only reaches them through this interface.
pub trait Container {
    fn add(&mut self, indiv: Individual) -> Result<AddOutcome, QdError>;

    /// Recomputes every member's cached novelty and local quality.
    fn update(&mut self);

    fn members(&self) -> &[Individual];

    fn get(&self, id: IndividualId) -> Option<&Individual>;

    fn get_mut(&mut self, id: IndividualId) -> Option<&mut Individual>;

    /// Novelty of any individual, member or not, against the current contents.
    fn novelty_of(&self, indiv: &Individual) -> f64;

    fn local_quality_of(&self, indiv: &Individual) -> u32;

    /// Whether summed novelty is a meaningful collection metric.
    fn reports_novelty(&self) -> bool;

    /// Grid cell of an individual rendered as text, if the container is discretized.
    fn cell_label(&self, indiv: &Individual) -> Option<String>;

    fn len(&self) -> usize {
        self.members().len()
    }

    fn is_empty(&self) -> bool {
        self.members().is_empty()
    }
}

/// Either container, chosen at run time.
#[derive(Debug, Clone)]
pub enum AnyContainer {
    Grid(GridContainer),
    Archive(ArchiveContainer),
}

impl AnyContainer {
    pub fn from_config(config: &ContainerConfig, descriptor_size: usize, quality_offset: f64) -> Self {
        match config {
            ContainerConfig::Grid(g) => AnyContainer::Grid(GridContainer::new(g.clone())),
            ContainerConfig::Archive(a) => {
                AnyContainer::Archive(ArchiveContainer::new(a.clone(), descriptor_size, quality_offset))
            }
        }
    }

    /// Number of descriptor dimensions the container expects.
    pub fn descriptor_dim(&self) -> usize {
        match self {
            AnyContainer::Grid(g) => g.config().resolution.len(),
            AnyContainer::Archive(a) => a.dim(),
        }
    }

    fn inner(&self) -> &dyn Container {
        match self {
            AnyContainer::Grid(g) => g,
            AnyContainer::Archive(a) => a,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Container {
        match self {
            AnyContainer::Grid(g) => g,
            AnyContainer::Archive(a) => a,
        }
    }
}

impl Container for AnyContainer {
    fn add(&mut self, indiv: Individual) -> Result<AddOutcome, QdError> {
        self.inner_mut().add(indiv)
    }

    fn update(&mut self) {
        self.inner_mut().update()
    }

    fn members(&self) -> &[Individual] {
        self.inner().members()
    }

    fn get(&self, id: IndividualId) -> Option<&Individual> {
        self.inner().get(id)
    }

    fn get_mut(&mut self, id: IndividualId) -> Option<&mut Individual> {
        self.inner_mut().get_mut(id)
    }

    fn novelty_of(&self, indiv: &Individual) -> f64 {
        self.inner().novelty_of(indiv)
    }

    fn local_quality_of(&self, indiv: &Individual) -> u32 {
        self.inner().local_quality_of(indiv)
    }

    fn reports_novelty(&self) -> bool {
        self.inner().reports_novelty()
    }

    fn cell_label(&self, indiv: &Individual) -> Option<String> {
        self.inner().cell_label(indiv)
    }
}
