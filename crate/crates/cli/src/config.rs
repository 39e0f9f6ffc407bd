//! Turning flags and config files into a fully resolved run description.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use qd_core::config::{
    ContainerConfig, ContainerKind, GridConfig, MutationConfig, MutationKind, RunConfig, Score,
    SelectorConfig, SelectorKind,
};
use qd_core::nslc::NslcParams;
use qd_core::tasks::TaskKind;
use serde::{Deserialize, Serialize};

use crate::variants::{self, Algorithm};

/// Every setting a run accepts. All of them are optional so that a config
/// file and the command line can each supply a subset.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunArgs {
    /// Evaluation task.
    #[arg(long, value_parser = ["arm", "synthetic6"])]
    pub task: Option<String>,
    /// Named variant, e.g. grid_random or nslc (see `qd variants`).
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long, value_parser = ["grid", "archive"])]
    pub container: Option<String>,
    #[arg(long, value_parser = ["none", "uniform", "score", "population", "pareto"])]
    pub selector: Option<String>,
    /// Score ranked by the `score` and `population` selectors.
    #[arg(long, value_parser = ["fitness", "novelty", "curiosity"])]
    pub score: Option<String>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of replicates; seeds are `seed + index`.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub log_interval: Option<usize>,
    #[arg(long, value_parser = ["polynomial", "resample"])]
    pub mutation: Option<String>,
    /// Per-gene mutation probability.
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    /// Distribution index of polynomial mutation.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Cells per dimension: one number for all dimensions, or a comma list.
    #[arg(long)]
    pub grid_res: Option<String>,
    #[arg(long)]
    pub subgrid_depth: Option<usize>,
    /// Minimum distance between archive members.
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Neighbours used for novelty and local quality.
    #[arg(long)]
    pub knn: Option<usize>,
    /// Initial novelty threshold of the NSLC archive.
    #[arg(long)]
    pub rho_init: Option<f64>,
    #[arg(long)]
    pub reward: Option<f64>,
    #[arg(long)]
    pub penalty: Option<f64>,
    #[arg(long)]
    pub tournament_size: Option<usize>,
    /// JSON file with any of these settings, or a config.json from an
    /// earlier run. Flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        RunArgs { $($field: $top.$field.or($base.$field),)* }
    };
}

impl RunArgs {
    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: RunArgs) -> RunArgs {
        overlay!(
            base, self, task, variant, container, selector, score, batch_size, iterations, seed,
            reps, out, log_interval, mutation, mutation_rate, eta, grid_res, subgrid_depth, l,
            epsilon, knn, rho_init, reward, penalty, tournament_size, config
        )
    }

    /// Reads a config file: either a subset of the flags or a config.json
    /// written by a previous run.
    pub fn from_file(path: &Path) -> Result<RunArgs> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("config file {} is not valid JSON", path.display()))?;
        if value.get("run").is_some() {
            let resolved: ResolvedConfig = serde_json::from_value(value)
                .with_context(|| format!("config file {} is not a valid run config", path.display()))?;
            Ok(resolved.to_args())
        } else {
            serde_json::from_value(value)
                .with_context(|| format!("config file {} has invalid settings", path.display()))
        }
    }

    /// Loads the `--config` file, if any, underneath these flags.
    pub fn with_file(self) -> Result<RunArgs> {
        match &self.config {
            Some(path) => Ok(self.clone().over(RunArgs::from_file(path)?)),
            None => Ok(self),
        }
    }
}

/// Everything needed to reproduce a run, written verbatim to config.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub task: TaskKind,
    /// Variant name, or "custom" when the settings match none.
    pub variant: String,
    pub algorithm: Algorithm,
    pub run: RunConfig,
    /// Present for NSLC runs only.
    pub nslc: Option<NslcParams>,
    pub out: PathBuf,
    pub reps: usize,
}

fn container_name(kind: ContainerKind) -> &'static str {
    match kind {
        ContainerKind::Grid => "grid",
        ContainerKind::Archive => "archive",
    }
}

fn selector_name(kind: SelectorKind) -> &'static str {
    match kind {
        SelectorKind::NoSelection => "none",
        SelectorKind::Uniform => "uniform",
        SelectorKind::ScoreProportionate => "score",
        SelectorKind::Population => "population",
        SelectorKind::Pareto => "pareto",
    }
}

fn parse_selector(name: &str) -> Result<SelectorKind> {
    Ok(match name {
        "none" => SelectorKind::NoSelection,
        "uniform" => SelectorKind::Uniform,
        "score" => SelectorKind::ScoreProportionate,
        "population" => SelectorKind::Population,
        "pareto" => SelectorKind::Pareto,
        other => bail!("unknown selector `{other}` (expected none, uniform, score, population or pareto)"),
    })
}

fn score_name(score: Score) -> &'static str {
    match score {
        Score::Fitness => "fitness",
        Score::Novelty => "novelty",
        Score::Curiosity => "curiosity",
    }
}

fn parse_score(name: &str) -> Result<Score> {
    Ok(match name {
        "fitness" => Score::Fitness,
        "novelty" => Score::Novelty,
        "curiosity" => Score::Curiosity,
        other => bail!("unknown score `{other}` (expected fitness, novelty or curiosity)"),
    })
}

fn parse_grid_res(text: &str, dims: usize) -> Result<Vec<usize>> {
    let parts: Vec<usize> = text
        .split([',', 'x'])
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow!("--grid-res `{text}` is not a number or comma list of numbers"))?;
    match parts.len() {
        1 => Ok(vec![parts[0]; dims]),
        n if n == dims => Ok(parts),
        n => bail!("--grid-res gives {n} dimensions, the task has {dims}"),
    }
}

fn default_out(variant: &str, task: TaskKind) -> PathBuf {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    PathBuf::from("runs").join(format!("{variant}_{task}_{stamp}"))
}

/// Checks one setting against the value a variant fixes.
fn agree(flag: &str, given: Option<&str>, fixed: Option<&str>, variant: &str) -> Result<()> {
    match given {
        Some(g) if Some(g) != fixed => bail!(
            "--{flag} {g} conflicts with --variant {variant}, which uses {}",
            fixed.map_or_else(|| format!("no --{flag}"), |f| format!("--{flag} {f}"))
        ),
        _ => Ok(()),
    }
}

impl ResolvedConfig {
    pub fn resolve(args: &RunArgs) -> Result<ResolvedConfig> {
        let task: TaskKind = args
            .task
            .as_deref()
            .unwrap_or("arm")
            .parse()
            .map_err(|e: String| anyhow!(e))?;
        let built = task.build();
        let params = task.parameters();

        let (algorithm, container, selector, score) = match &args.variant {
            Some(name) => {
                let v = variants::lookup(name)
                    .ok_or_else(|| anyhow!("unknown variant `{name}` (run `qd variants` for the list)"))?;
                agree("container", args.container.as_deref(), Some(v.container), name)?;
                agree("selector", args.selector.as_deref(), v.selector, name)?;
                agree("score", args.score.as_deref(), v.score, name)?;
                (v.algorithm, v.container.to_string(), v.selector.map(String::from), v.score.map(String::from))
            }
            None => (
                Algorithm::Qd,
                args.container.clone().unwrap_or_else(|| "grid".into()),
                Some(args.selector.clone().unwrap_or_else(|| "uniform".into())),
                args.score.clone(),
            ),
        };

        let selector = match (algorithm, selector) {
            (Algorithm::Nslc, _) => SelectorConfig::pareto(),
            (Algorithm::Qd, sel) => {
                let kind = parse_selector(sel.as_deref().unwrap_or("uniform"))?;
                let score = score.as_deref().map(parse_score).transpose()?;
                match (kind.needs_score(), score) {
                    (false, Some(s)) => bail!(
                        "--score {} only applies to --selector score or population, not {}",
                        score_name(s),
                        selector_name(kind)
                    ),
                    (true, None) => bail!("--selector {} needs --score", selector_name(kind)),
                    _ => {}
                }
                SelectorConfig {
                    kind,
                    score,
                    tournament_size: args.tournament_size.unwrap_or(SelectorConfig::DEFAULT_TOURNAMENT),
                }
            }
        };
        if args.tournament_size.is_some() && selector.kind != SelectorKind::Population {
            bail!("--tournament-size only applies to --selector population");
        }

        let mutation_kind = match args.mutation.as_deref() {
            None => match (params.mutation.kind, args.eta) {
                (MutationKind::Polynomial { .. }, Some(eta)) => MutationKind::Polynomial { eta },
                (kind, None) => kind,
                (MutationKind::Resample, Some(_)) => {
                    bail!("--eta only applies to --mutation polynomial, task {task} resamples")
                }
            },
            Some("polynomial") => MutationKind::Polynomial {
                eta: args.eta.unwrap_or(MutationConfig::DEFAULT_ETA),
            },
            Some("resample") if args.eta.is_some() => bail!("--eta only applies to --mutation polynomial"),
            Some("resample") => MutationKind::Resample,
            Some(other) => bail!("unknown mutation `{other}` (expected polynomial or resample)"),
        };
        let mutation = MutationConfig {
            kind: mutation_kind,
            per_gene_rate: args.mutation_rate.unwrap_or(params.mutation.per_gene_rate),
        };

        let knn = args.knn.unwrap_or(params.k_nn);
        let container = match container.as_str() {
            "grid" => {
                if args.l.is_some() || args.epsilon.is_some() {
                    bail!("--l and --epsilon only apply to --container archive");
                }
                let resolution = match &args.grid_res {
                    Some(text) => parse_grid_res(text, built.descriptor_size())?,
                    None => params.grid_resolution.clone(),
                };
                ContainerConfig::Grid(GridConfig {
                    resolution,
                    subgrid_depth: args.subgrid_depth.unwrap_or(params.subgrid_depth),
                })
            }
            "archive" => {
                if args.grid_res.is_some() || args.subgrid_depth.is_some() {
                    bail!("--grid-res and --subgrid-depth only apply to --container grid");
                }
                let mut a = params.archive();
                a.l = args.l.unwrap_or(a.l);
                a.epsilon = args.epsilon.unwrap_or(a.epsilon);
                a.k_nn = knn;
                ContainerConfig::Archive(a)
            }
            other => bail!("unknown container `{other}` (expected grid or archive)"),
        };

        let nslc = match algorithm {
            Algorithm::Nslc => {
                let mut p = NslcParams::new(args.rho_init.unwrap_or(params.rho_init));
                p.k_nn = knn;
                p.validate()?;
                Some(p)
            }
            Algorithm::Qd if args.rho_init.is_some() => bail!("--rho-init only applies to --variant nslc"),
            Algorithm::Qd => None,
        };

        let run = RunConfig {
            batch_size: args.batch_size.unwrap_or(RunConfig::DEFAULT_BATCH),
            iterations: args.iterations.unwrap_or(RunConfig::DEFAULT_ITERATIONS),
            reward: args.reward.unwrap_or(RunConfig::DEFAULT_REWARD),
            penalty: args.penalty.unwrap_or(RunConfig::DEFAULT_PENALTY),
            container,
            selector,
            mutation,
            seed: args.seed.unwrap_or(0),
            log_interval: args.log_interval.unwrap_or(RunConfig::DEFAULT_LOG_INTERVAL),
        };
        run.validate(built.as_ref())?;

        let reps = args.reps.unwrap_or(1);
        if reps < 1 {
            bail!("--reps must be at least 1");
        }

        let variant = match algorithm {
            Algorithm::Nslc => "nslc".to_string(),
            Algorithm::Qd => variants::identify(
                container_name(run.container.kind()),
                selector_name(run.selector.kind),
                run.selector.score.map(score_name),
            )
            .map_or_else(|| "custom".to_string(), |v| v.name.to_string()),
        };
        let out = args.out.clone().unwrap_or_else(|| default_out(&variant, task));
        Ok(ResolvedConfig {
            task,
            variant,
            algorithm,
            run,
            nslc,
            out,
            reps,
        })
    }

    /// Flags that resolve back to this configuration.
    pub fn to_args(&self) -> RunArgs {
        let r = &self.run;
        let (variant, container, selector, score, tournament_size) = match self.algorithm {
            Algorithm::Nslc => (Some("nslc".to_string()), None, None, None, None),
            Algorithm::Qd => (
                None,
                Some(container_name(r.container.kind()).to_string()),
                Some(selector_name(r.selector.kind).to_string()),
                r.selector.score.map(|s| score_name(s).to_string()),
                (r.selector.kind == SelectorKind::Population).then_some(r.selector.tournament_size),
            ),
        };
        let (mutation, eta) = match r.mutation.kind {
            MutationKind::Polynomial { eta } => ("polynomial", Some(eta)),
            MutationKind::Resample => ("resample", None),
        };
        let mut args = RunArgs {
            task: Some(self.task.to_string()),
            variant,
            container,
            selector,
            score,
            batch_size: Some(r.batch_size),
            iterations: Some(r.iterations),
            seed: Some(r.seed),
            reps: Some(self.reps),
            out: Some(self.out.clone()),
            log_interval: Some(r.log_interval),
            mutation: Some(mutation.to_string()),
            mutation_rate: Some(r.mutation.per_gene_rate),
            eta,
            reward: Some(r.reward),
            penalty: Some(r.penalty),
            tournament_size,
            ..RunArgs::default()
        };
        match &r.container {
            ContainerConfig::Grid(g) => {
                let res: Vec<String> = g.resolution.iter().map(usize::to_string).collect();
                args.grid_res = Some(res.join(","));
                args.subgrid_depth = Some(g.subgrid_depth);
            }
            ContainerConfig::Archive(a) => {
                args.l = Some(a.l);
                args.epsilon = Some(a.epsilon);
                args.knn = Some(a.k_nn);
            }
        }
        if let Some(p) = &self.nslc {
            args.rho_init = Some(p.rho_init);
            args.knn = Some(p.k_nn);
        }
        args
    }
}
