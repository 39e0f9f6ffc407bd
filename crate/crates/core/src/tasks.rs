//! Evaluation tasks: genotype in, `(descriptor, fitness)` out.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{MutationConfig, MutationKind, TaskParameters};
use crate::types::{Descriptor, Encoding, Genotype};

/// A pure evaluation function. Implementations must be deterministic and
/// free of shared mutable state so that batches can be evaluated in parallel.
pub trait Task: Sync {
    fn name(&self) -> &str;
    fn genotype_size(&self) -> usize;
    fn encoding(&self) -> Encoding;
    fn descriptor_size(&self) -> usize;
    /// Added to raw fitness to obtain a strictly positive quality.
    fn quality_offset(&self) -> f64;
    fn evaluate(&self, genotype: &Genotype) -> Result<(Descriptor, f64), String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Arm,
    Synthetic6,
}

impl TaskKind {
    pub const ALL: [TaskKind; 2] = [TaskKind::Arm, TaskKind::Synthetic6];

    pub fn build(self) -> Box<dyn Task> {
        match self {
            TaskKind::Arm => Box::new(RedundantArm::default()),
            TaskKind::Synthetic6 => Box::new(Synthetic6),
        }
    }

    pub fn parameters(self) -> TaskParameters {
        match self {
            TaskKind::Arm => TaskParameters {
                mutation: MutationConfig {
                    kind: MutationKind::Polynomial {
                        eta: MutationConfig::DEFAULT_ETA,
                    },
                    per_gene_rate: 0.125,
                },
                grid_resolution: vec![100, 100],
                subgrid_depth: 3,
                l: 0.01,
                epsilon: 0.1,
                k_nn: 15,
                rho_init: 0.01,
            },
            TaskKind::Synthetic6 => TaskParameters {
                mutation: MutationConfig {
                    kind: MutationKind::Resample,
                    per_gene_rate: 0.05,
                },
                grid_resolution: vec![5; 6],
                subgrid_depth: 1,
                l: 0.25,
                epsilon: 0.1,
                k_nn: 15,
                rho_init: 1.0,
            },
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskKind::Arm => "arm",
            TaskKind::Synthetic6 => "synthetic6",
        })
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arm" => Ok(TaskKind::Arm),
            "synthetic6" => Ok(TaskKind::Synthetic6),
            other => Err(format!("unknown task `{other}` (expected arm or synthetic6)")),
        }
    }
}

/// Population variance (divides by n). Values are shifted by the first one
/// before averaging, so identical values give exactly zero.
pub fn population_variance(values: &[f64]) -> f64 {
    let Some(&origin) = values.first() else {
        return 0.0;
    };
    let n = values.len() as f64;
    let mean = values.iter().map(|v| v - origin).sum::<f64>() / n;
    values
        .iter()
        .map(|v| (v - origin - mean) * (v - origin - mean))
        .sum::<f64>()
        / n
}

/// Planar arm with equal links and joints limited to `[-pi/2, pi/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmParams {
    pub joints: usize,
    /// Total length when fully deployed.
    pub length: f64,
    /// Half side of the normalization box, as a multiple of `length`.
    pub box_margin: f64,
}

impl Default for ArmParams {
    fn default() -> Self {
        Self {
            joints: 8,
            length: 1.0,
            box_margin: 1.1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RedundantArm {
    pub params: ArmParams,
}

impl RedundantArm {
    /// Joint angle for a normalized gene.
    pub fn angle(gene: f64) -> f64 {
        (gene - 0.5) * 2.0 * FRAC_PI_2
    }

    /// Gripper position with the base at the origin.
    pub fn forward_kinematics(&self, genes: &[f64]) -> (f64, f64) {
        let link = self.params.length / genes.len() as f64;
        let mut heading = 0.0;
        let (mut x, mut y) = (0.0, 0.0);
        for &g in genes {
            heading += Self::angle(g);
            x += link * heading.cos();
            y += link * heading.sin();
        }
        (x, y)
    }

    pub fn normalize(&self, (x, y): (f64, f64)) -> [f64; 2] {
        let half = self.params.box_margin * self.params.length;
        [(x + half) / (2.0 * half), (y + half) / (2.0 * half)]
    }
}

impl Task for RedundantArm {
    fn name(&self) -> &str {
        "arm"
    }

    fn genotype_size(&self) -> usize {
        self.params.joints
    }

    fn encoding(&self) -> Encoding {
        Encoding::Continuous
    }

    fn descriptor_size(&self) -> usize {
        2
    }

    fn quality_offset(&self) -> f64 {
        1.0
    }

    fn evaluate(&self, genotype: &Genotype) -> Result<(Descriptor, f64), String> {
        let genes = genotype.values();
        if genes.len() != self.params.joints {
            return Err(format!(
                "arm expects {} genes, got {}",
                self.params.joints,
                genes.len()
            ));
        }
        let position = self.forward_kinematics(genes);
        let fitness = -population_variance(genes);
        Ok((Descriptor::new(self.normalize(position).to_vec()), fitness))
    }
}

/// Six-dimensional stand-in task: each descriptor coordinate is the mean of
/// a block of six genes and fitness penalizes gene spread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Synthetic6;

impl Synthetic6 {
    pub const GENES: usize = 36;
    pub const BLOCK: usize = 6;
    pub const STEP: f64 = 0.05;
}

impl Task for Synthetic6 {
    fn name(&self) -> &str {
        "synthetic6"
    }

    fn genotype_size(&self) -> usize {
        Self::GENES
    }

    fn encoding(&self) -> Encoding {
        Encoding::Sampled { step: Self::STEP }
    }

    fn descriptor_size(&self) -> usize {
        Self::GENES / Self::BLOCK
    }

    fn quality_offset(&self) -> f64 {
        1.0
    }

    fn evaluate(&self, genotype: &Genotype) -> Result<(Descriptor, f64), String> {
        let genes = genotype.values();
        if genes.len() != Self::GENES {
            return Err(format!("synthetic6 expects {} genes, got {}", Self::GENES, genes.len()));
        }
        let coords = genes
            .chunks(Self::BLOCK)
            .map(|block| block.iter().sum::<f64>() / Self::BLOCK as f64)
            .collect();
        Ok((Descriptor::new(coords), -population_variance(genes)))
    }
}
