//! The generic quality-diversity loop.
//!
//! Iteration 1 evaluates two random batches and offers both to the
//! container. Every later iteration selects a parent batch, mutates it,
//! evaluates the offspring, offers each one to the container in index
//! order, and credits or penalizes the parent's curiosity.
//!
//! Cached member scores are refreshed at the end of every batch whose state
//! is observed: before a selection that reads them, and before logging.
//! Skipped refreshes cannot change any output.

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::container::{AddOutcome, AnyContainer, Container};
use crate::error::QdError;
use crate::metrics::{compute_metrics, MetricsRow};
use crate::selection::{Selected, Selector};
use crate::tasks::Task;
use crate::types::{rng_from_seed, Genotype, Individual, IndividualId, QdRng};
use crate::variation::mutate;

/// How offspring evaluation is scheduled. Results never depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Serial,
    Threads(usize),
}

impl Parallelism {
    /// `0` means serial.
    pub fn from_thread_count(threads: usize) -> Self {
        if threads == 0 {
            Parallelism::Serial
        } else {
            Parallelism::Threads(threads)
        }
    }
}

/// One offer of an offspring to the container.
#[derive(Debug, Clone, PartialEq)]
pub struct AddEvent {
    pub batch: usize,
    pub offspring: IndividualId,
    pub parent: Option<IndividualId>,
    pub outcome: AddOutcome,
    /// Whether the parent's curiosity was updated. False when there is no
    /// parent or the parent is no longer stored in the container.
    pub curiosity_applied: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub container: AnyContainer,
    pub trace: Vec<MetricsRow>,
    pub events: Vec<AddEvent>,
}

/// Adds `reward` to the parent's curiosity if its offspring was accepted,
/// subtracts `penalty` otherwise.
pub fn curiosity_update(parent: &mut Individual, accepted: bool, reward: f64, penalty: f64) {
    if accepted {
        parent.curiosity += reward;
    } else {
        parent.curiosity -= penalty;
    }
}

/// Evaluates genotypes in index order (or in parallel, collected by index).
pub(crate) struct Evaluator {
    pool: Option<rayon::ThreadPool>,
}

impl Evaluator {
    pub(crate) fn new(parallelism: Parallelism) -> Result<Self, QdError> {
        let pool = match parallelism {
            Parallelism::Serial => None,
            Parallelism::Threads(n) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| QdError::Config(format!("cannot start {n} evaluation threads: {e}")))?,
            ),
        };
        Ok(Self { pool })
    }

    /// `pending` holds `(id, parent, genotype)` triples.
    pub(crate) fn evaluate(
        &self,
        task: &dyn Task,
        batch: usize,
        pending: Vec<(IndividualId, Option<IndividualId>, Genotype)>,
    ) -> Result<Vec<Individual>, QdError> {
        let eval = |(id, parent, genotype): (IndividualId, Option<IndividualId>, Genotype)| {
            match task.evaluate(&genotype) {
                Ok((descriptor, fitness)) if fitness.is_finite() => {
                    Ok(Individual::new(id, parent, genotype, descriptor, fitness))
                }
                Ok((_, fitness)) => Err(QdError::Evaluation {
                    batch,
                    id,
                    message: format!("non-finite fitness {fitness}"),
                }),
                Err(message) => Err(QdError::Evaluation { batch, id, message }),
            }
        };
        match &self.pool {
            None => pending.into_iter().map(eval).collect(),
            Some(pool) => pool.install(|| pending.into_par_iter().map(eval).collect()),
        }
    }
}

struct IdSource(IndividualId);

impl IdSource {
    fn next(&mut self) -> IndividualId {
        let id = self.0;
        self.0 += 1;
        id
    }
}

fn random_batch(task: &dyn Task, size: usize, ids: &mut IdSource, rng: &mut QdRng) -> Vec<(IndividualId, Option<IndividualId>, Genotype)> {
    (0..size)
        .map(|_| (ids.next(), None, Genotype::random(task.encoding(), task.genotype_size(), rng)))
        .collect()
}

pub fn run_qd(config: &RunConfig, task: &dyn Task) -> Result<RunOutput, QdError> {
    run_qd_with(config, task, Parallelism::Serial)
}

pub fn run_qd_with(
    config: &RunConfig,
    task: &dyn Task,
    parallelism: Parallelism,
) -> Result<RunOutput, QdError> {
    config.validate(task)?;
    let evaluator = Evaluator::new(parallelism)?;
    let mut rng = rng_from_seed(config.seed);
    let mut ids = IdSource(0);
    let offset = task.quality_offset();
    let mut container =
        AnyContainer::from_config(&config.container, task.descriptor_size(), offset);
    let selector = Selector::new(config.selector.clone(), task.encoding(), task.genotype_size());
    let batch_size = config.batch_size;

    let mut trace = Vec::new();
    let mut events = Vec::new();
    let mut evals: u64 = 0;
    let mut prev_parents: Vec<Individual> = Vec::new();
    let mut prev_offspring: Vec<Individual> = Vec::new();

    for iteration in 1..=config.iterations {
        if iteration == 1 {
            let first = random_batch(task, batch_size, &mut ids, &mut rng);
            let second = random_batch(task, batch_size, &mut ids, &mut rng);
            prev_parents = evaluator.evaluate(task, iteration, first)?;
            prev_offspring = evaluator.evaluate(task, iteration, second)?;
            for indiv in prev_parents.iter().chain(&prev_offspring) {
                let outcome = container.add(indiv.clone())?;
                events.push(AddEvent {
                    batch: iteration,
                    offspring: indiv.id(),
                    parent: None,
                    outcome,
                    curiosity_applied: false,
                });
            }
            evals += 2 * batch_size as u64;
        } else {
            let selected =
                selector.select(&container, &prev_parents, &prev_offspring, batch_size, &mut rng);
            let pending: Vec<_> = selected
                .iter()
                .map(|s| match s {
                    Selected::Fresh(g) => (ids.next(), None, g.clone()),
                    Selected::Parent(p) => {
                        let child = mutate(p.genotype(), &config.mutation, &mut rng);
                        (ids.next(), Some(p.id()), child)
                    }
                })
                .collect();
            let offspring = evaluator.evaluate(task, iteration, pending)?;
            for indiv in &offspring {
                let outcome = container.add(indiv.clone())?;
                let curiosity_applied = match indiv.parent_id().and_then(|p| container.get_mut(p)) {
                    Some(parent) => {
                        curiosity_update(parent, outcome.accepted(), config.reward, config.penalty);
                        true
                    }
                    None => false,
                };
                events.push(AddEvent {
                    batch: iteration,
                    offspring: indiv.id(),
                    parent: indiv.parent_id(),
                    outcome,
                    curiosity_applied,
                });
            }
            evals += batch_size as u64;
            prev_parents = selected.into_iter().filter_map(|s| match s {
                Selected::Parent(p) => Some(p),
                Selected::Fresh(_) => None,
            }).collect();
            prev_offspring = offspring;
        }

        let logged = iteration % config.log_interval == 0 || iteration == config.iterations;
        if logged || config.selector.reads_cached_scores() {
            container.update();
        }
        if logged {
            trace.push(compute_metrics(&container, offset, iteration, evals));
        }
    }

    Ok(RunOutput {
        container,
        trace,
        events,
    })
}
