//! Quality-diversity optimization built from interchangeable parts.
//!
//! A run couples a [`Container`](container::Container) (a discretized
//! [`GridContainer`](container::GridContainer) or a distance-based
//! [`ArchiveContainer`](container::ArchiveContainer)) with a selection
//! operator and a mutation operator, and drives them with one generic loop
//! ([`run::run_qd`]). The same building blocks also assemble a Novelty Search
//! with Local Competition baseline ([`nslc`]).
//!
//! ```
//! use qd_core::prelude::*;
//!
//! let task = TaskKind::Arm.build();
//! let config = RunConfig::for_task(TaskKind::Arm, ContainerKind::Grid)
//!     .with_selector(SelectorConfig::uniform())
//!     .with_iterations(5)
//!     .with_seed(7);
//! let output = run_qd(&config, task.as_ref()).unwrap();
//! assert!(output.container.len() > 0);
//! ```

pub mod config;
pub mod container;
pub mod error;
pub mod metrics;
pub mod nsga;
pub mod nslc;
pub mod render;
pub mod report;
pub mod run;
pub mod selection;
pub mod tasks;
pub mod types;
pub mod variation;

pub use error::QdError;

pub mod prelude {
    pub use crate::config::{
        ArchiveConfig, ContainerConfig, ContainerKind, GridConfig, MutationConfig, MutationKind,
        RunConfig, Score, SelectorConfig, SelectorKind,
    };
    pub use crate::container::{
        AddOutcome, AnyContainer, ArchiveContainer, Container, GridContainer, RejectReason,
    };
    pub use crate::error::QdError;
    pub use crate::metrics::{compute_metrics, MetricsRow};
    pub use crate::nslc::{run_nslc, NslcParams};
    pub use crate::run::{run_qd, run_qd_with, AddEvent, Parallelism, RunOutput};
    pub use crate::tasks::{Task, TaskKind};
    pub use crate::types::{Descriptor, Encoding, Genotype, Individual, IndividualId, QdRng};
}
