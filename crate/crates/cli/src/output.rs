//! Executing resolved runs and writing their artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qd_core::metrics::summarize;
use qd_core::render::render_collection_svg;
use qd_core::report::{collection_csv, metrics_csv, parse_metrics_csv, summary_csv};
use qd_core::run::{run_qd_with, Parallelism, RunOutput};
use qd_core::nslc::run_nslc;

use crate::config::ResolvedConfig;
use crate::variants::Algorithm;

pub const CONFIG_FILE: &str = "config.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const COLLECTION_FILE: &str = "collection.csv";
pub const SVG_FILE: &str = "collection.svg";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Reads `QD_THREADS`. Unset means one thread per available core; `0` means
/// serial evaluation on the calling thread.
pub fn parallelism_from(value: Option<&str>) -> Result<Parallelism> {
    match value {
        None => Ok(Parallelism::from_thread_count(
            std::thread::available_parallelism().map_or(1, usize::from),
        )),
        Some(v) => v
            .trim()
            .parse::<usize>()
            .map(Parallelism::from_thread_count)
            .with_context(|| format!("QD_THREADS must be a non-negative integer, got `{v}`")),
    }
}

pub fn execute(config: &ResolvedConfig, parallelism: Parallelism) -> Result<RunOutput> {
    let task = config.task.build();
    let output = match (config.algorithm, &config.nslc) {
        (Algorithm::Nslc, Some(params)) => run_nslc(&config.run, params, task.as_ref(), parallelism)?,
        (Algorithm::Nslc, None) => bail!("NSLC configuration lacks its parameters"),
        (Algorithm::Qd, _) => run_qd_with(&config.run, task.as_ref(), parallelism)?,
    };
    Ok(output)
}

/// Writes config.json, metrics.csv, collection.csv and, for 2-D
/// descriptors, collection.svg. Returns the files written.
pub fn write_run(dir: &Path, config: &ResolvedConfig, output: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut files = vec![
        (CONFIG_FILE, serde_json::to_string_pretty(config)? + "\n"),
        (METRICS_FILE, metrics_csv(&output.trace)),
        (COLLECTION_FILE, collection_csv(&output.container)),
    ];
    if output.container.descriptor_dim() == 2 {
        files.push((SVG_FILE, render_collection_svg(&output.container)?));
    }
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(path)
        })
        .collect()
}

/// One run into `config.out`.
pub fn cmd_run(config: &ResolvedConfig, parallelism: Parallelism) -> Result<PathBuf> {
    let output = execute(config, parallelism)?;
    write_run(&config.out, config, &output)?;
    Ok(config.out.clone())
}

pub fn rep_dir(root: &Path, index: usize) -> PathBuf {
    root.join(format!("rep_{index:03}"))
}

/// Quartiles across the given metrics.csv files, per logged batch.
pub fn summarize_files(paths: &[PathBuf]) -> Result<String> {
    let traces = paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok(parse_metrics_csv(&text)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summary_csv(&summarize(&traces)))
}

#[derive(Debug)]
pub struct ReplicateReport {
    pub completed: Vec<usize>,
    pub failed: Vec<(usize, String)>,
    pub summary: PathBuf,
}

/// Runs `config.reps` replicates with seeds `seed + index` into
/// `out/rep_NNN`, then writes `out/summary.csv` over the completed ones.
pub fn cmd_replicate(config: &ResolvedConfig, parallelism: Parallelism) -> Result<ReplicateReport> {
    let root = &config.out;
    fs::create_dir_all(root).with_context(|| format!("cannot create {}", root.display()))?;
    fs::write(root.join(CONFIG_FILE), serde_json::to_string_pretty(config)? + "\n")?;
    let mut completed = Vec::new();
    let mut failed = Vec::new();
    for index in 0..config.reps {
        let mut rep = config.clone();
        rep.run.seed = config.run.seed.wrapping_add(index as u64);
        rep.out = rep_dir(root, index);
        rep.reps = 1;
        match execute(&rep, parallelism).and_then(|out| write_run(&rep.out, &rep, &out)) {
            Ok(_) => completed.push(index),
            Err(e) => failed.push((index, format!("{e:#}"))),
        }
    }
    if completed.is_empty() {
        let (index, why) = &failed[0];
        bail!("all {} replicates failed; replicate {index}: {why}", config.reps);
    }
    let metrics: Vec<PathBuf> = completed.iter().map(|&i| rep_dir(root, i).join(METRICS_FILE)).collect();
    let summary = root.join(SUMMARY_FILE);
    fs::write(&summary, summarize_files(&metrics)?)?;
    Ok(ReplicateReport {
        completed,
        failed,
        summary,
    })
}
