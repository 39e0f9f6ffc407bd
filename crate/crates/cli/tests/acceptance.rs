//! Acceptance suite. Each criterion prints one PASS or FAIL line; the
//! process exits non-zero if any criterion fails.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qd_cli::variants::VARIANTS;
use qd_core::config::{
    ArchiveConfig, ContainerKind, GridConfig, RunConfig, Score, SelectorConfig,
};
use qd_core::container::{
    exclusive_eps_dominates, AddOutcome, ArchiveContainer, Container, GridContainer,
    NoveltyQuality,
};
use qd_core::nsga::non_dominated_sort;
use qd_core::run::{run_qd, RunOutput};
use qd_core::tasks::{RedundantArm, Task, TaskKind};
use qd_core::types::{rng_from_seed, Descriptor, Encoding, Genotype, Individual};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ind(id: u64, coords: Vec<f64>, fitness: f64) -> Individual {
    Individual::new(
        id,
        None,
        Genotype::new(vec![], Encoding::Continuous).unwrap(),
        Descriptor::new(coords),
        fitness,
    )
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn archive_spacing() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(101);
    let l = 0.01;
    let mut archive = ArchiveContainer::new(ArchiveConfig { l, epsilon: 0.1, k_nn: 15 }, 2, 1.0);
    for id in 0..100_000u64 {
        let coords = vec![rng.gen::<f64>(), rng.gen::<f64>()];
        archive.add(ind(id, coords, -rng.gen::<f64>())).map_err(|e| e.to_string())?;
    }
    let pts: Vec<&[f64]> = archive.members().iter().map(|m| m.descriptor().coords()).collect();
    let mut min = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            min = min.min(dist(pts[i], pts[j]));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(min > l, || format!("min pairwise distance {min} <= {l}"))?;
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} members, min distance {min:.9} > {l}, {secs:.1}s", pts.len()))
}

/// Brute-force neighbours of `query`: all others sorted by (distance, id).
fn brute_neighbours<'a>(members: &'a [Individual], query: &Individual, k: usize) -> Vec<(f64, &'a Individual)> {
    let mut all: Vec<(f64, &Individual)> = members
        .iter()
        .filter(|m| m.id() != query.id())
        .map(|m| (dist(m.descriptor().coords(), query.descriptor().coords()), m))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.id().cmp(&b.1.id())));
    all.truncate(k);
    all
}

fn peel_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let dominates = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
    };
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rng_from_seed(202);
    let mut checks = 0usize;
    for instance in 0..200 {
        let n = rng.gen_range(1..=200);
        let dim = [1, 2, 3, 6][instance % 4];
        let k = rng.gen_range(1..=20);
        let mut archive = ArchiveContainer::new(ArchiveConfig { l: 1e-12, epsilon: 0.1, k_nn: k }, dim, 1.0);
        let res: Vec<usize> = (0..dim).map(|_| rng.gen_range(1..=12)).collect();
        let depth = rng.gen_range(0..=3);
        let mut grid = GridContainer::new(GridConfig { resolution: res.clone(), subgrid_depth: depth });
        for id in 0..n as u64 {
            let coords: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
            // Coarse fitness values make equal-fitness neighbours common.
            let fitness = -(rng.gen_range(0..8) as f64) / 8.0;
            archive.add(ind(id, coords.clone(), fitness)).map_err(|e| e.to_string())?;
            grid.add(ind(id, coords, fitness)).map_err(|e| e.to_string())?;
        }
        let probe_id = 1_000_000;
        let probes: Vec<Individual> = (0..20)
            .map(|i| ind(probe_id + i, (0..dim).map(|_| rng.gen()).collect(), -rng.gen::<f64>()))
            .collect();

        for q in archive.members().iter().chain(&probes) {
            let near = brute_neighbours(archive.members(), q, k);
            let novelty = if near.is_empty() {
                (dim as f64).sqrt()
            } else {
                near.iter().map(|n| n.0).sum::<f64>() / near.len() as f64
            };
            let lq = near.iter().filter(|n| n.1.fitness() < q.fitness()).count() as u32;
            let got_n = archive.novelty(q.descriptor().coords(), Some(q.id()));
            ensure(got_n == novelty, || format!("archive novelty {got_n} vs {novelty} (instance {instance})"))?;
            ensure(archive.local_quality(q) == lq, || format!("archive local quality (instance {instance})"))?;
            checks += 2;
        }

        let cell = |c: &[f64]| -> Vec<usize> {
            c.iter().zip(&res).map(|(&x, &r)| ((x * r as f64).floor() as usize).min(r - 1)).collect()
        };
        for q in grid.members().iter().chain(&probes) {
            let qc = cell(q.descriptor().coords());
            let in_bounds: usize = qc
                .iter()
                .zip(&res)
                .map(|(&c, &r)| (c + depth).min(r - 1) - c.saturating_sub(depth) + 1)
                .product();
            let neighbours: Vec<&Individual> = grid
                .members()
                .iter()
                .filter(|m| {
                    cell(m.descriptor().coords()).iter().zip(&qc).all(|(&a, &b)| a.abs_diff(b) <= depth)
                })
                .collect();
            let novelty = 1.0 - neighbours.len() as f64 / in_bounds as f64;
            let lq = neighbours.iter().filter(|m| m.id() != q.id() && m.fitness() < q.fitness()).count() as u32;
            let got_n = grid.novelty(q.descriptor().coords());
            ensure(got_n == novelty, || format!("grid novelty {got_n} vs {novelty} (instance {instance})"))?;
            ensure(grid.local_quality(q) == lq, || format!("grid local quality (instance {instance})"))?;
            checks += 2;
        }

        let objectives = rng.gen_range(2..=3);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..objectives).map(|_| rng.gen_range(0..10) as f64).collect())
            .collect();
        let mut fast = non_dominated_sort(&points);
        let mut slow = peel_fronts(&points);
        fast.iter_mut().chain(slow.iter_mut()).for_each(|f| f.sort_unstable());
        ensure(fast == slow, || format!("non-dominated fronts differ (instance {instance})"))?;
        checks += 1;
    }
    Ok(format!("200 instances, {checks} exact comparisons"))
}

fn epsilon_dominance() -> Outcome {
    let mut rng = rng_from_seed(303);
    let mut positives = 0;
    for _ in 0..10_000 {
        let x1 = (rng.gen_range(1e-3..2.0), rng.gen_range(1e-3..2.0));
        // Half the partners sit close to x1 so that all branches are exercised.
        let x2 = if rng.gen_bool(0.5) {
            (x1.0 * rng.gen_range(0.8..1.2), x1.1 * rng.gen_range(0.8..1.2))
        } else {
            (rng.gen_range(1e-3..2.0), rng.gen_range(1e-3..2.0))
        };
        let e: f64 = rng.gen_range(0.0..0.5);
        let (n1, q1, n2, q2) = (x1.0, x1.1, x2.0, x2.1);
        let direct = n1 >= (1.0 - e) * n2 && q1 >= (1.0 - e) * q2 && (n1 - n2) * q2 > -(q1 - q2) * n2;
        let got = exclusive_eps_dominates(NoveltyQuality::new(n1, q1), NoveltyQuality::new(n2, q2), e)
            .map_err(|err| err.to_string())?;
        ensure(got == direct, || format!("mismatch at {x1:?} vs {x2:?}, eps {e}"))?;
        positives += got as usize;
        let me = NoveltyQuality::new(n1, q1);
        ensure(!exclusive_eps_dominates(me, me, e).map_err(|err| err.to_string())?, || {
            format!("{x1:?} dominates itself at eps {e}")
        })?;
    }
    Ok(format!("10000 triples agree ({positives} dominating), 10000 self-pairs irreflexive"))
}

fn arm_config(container: ContainerKind, selector: SelectorConfig, iterations: usize, seed: u64) -> RunConfig {
    RunConfig::for_task(TaskKind::Arm, container)
        .with_selector(selector)
        .with_iterations(iterations)
        .with_seed(seed)
}

fn grid_monotonicity() -> Outcome {
    let task = TaskKind::Arm.build();
    let selectors = [
        SelectorConfig::no_selection(),
        SelectorConfig::uniform(),
        SelectorConfig::score(Score::Curiosity),
        SelectorConfig::population(Score::Fitness),
        SelectorConfig::pareto(),
    ];
    let mut rows = 0;
    for (i, sel) in selectors.into_iter().enumerate() {
        let cfg = arm_config(ContainerKind::Grid, sel, 300, 40 + i as u64).with_log_interval(1);
        let out = run_qd(&cfg, task.as_ref()).map_err(|e| e.to_string())?;
        for w in out.trace.windows(2) {
            ensure(w[1].total_quality >= w[0].total_quality, || {
                format!("total_quality fell at batch {}", w[1].batch)
            })?;
            ensure(w[1].size >= w[0].size, || format!("size fell at batch {}", w[1].batch))?;
        }
        rows += out.trace.len();
    }
    Ok(format!("5 selectors x 300 batches, {rows} rows non-decreasing"))
}

fn replay_ledger(out: &RunOutput, reward: f64, penalty: f64) -> Result<usize, String> {
    let mut ledger: HashMap<u64, f64> = HashMap::new();
    let (mut accepts, mut replacements) = (0usize, 0usize);
    for e in &out.events {
        match e.outcome {
            AddOutcome::AddedNew => accepts += 1,
            AddOutcome::Replaced(_) => {
                accepts += 1;
                replacements += 1
            }
            AddOutcome::Rejected(_) => {}
        }
        if e.curiosity_applied {
            let parent = e.parent.ok_or("curiosity applied without a parent")?;
            *ledger.entry(parent).or_insert(0.0) += if e.outcome.accepted() { reward } else { -penalty };
        }
    }
    ensure(accepts - replacements == out.container.len(), || {
        format!("{accepts} accepts - {replacements} replacements != {} members", out.container.len())
    })?;
    let mut credited = 0;
    for m in out.container.members() {
        let expected = ledger.get(&m.id()).copied().unwrap_or(0.0);
        ensure(m.curiosity == expected, || {
            format!("member {} curiosity {} but ledger {expected}", m.id(), m.curiosity)
        })?;
        credited += (expected != 0.0) as usize;
    }
    Ok(credited)
}

fn curiosity_ledger() -> Outcome {
    let task = TaskKind::Arm.build();
    let mut report = Vec::new();
    for container in [ContainerKind::Grid, ContainerKind::Archive] {
        for sel in [SelectorConfig::score(Score::Curiosity), SelectorConfig::population(Score::Curiosity)] {
            let mut cfg = arm_config(container, sel, 200, 55);
            cfg.reward = 1.0;
            cfg.penalty = 0.5;
            let out = run_qd(&cfg, task.as_ref()).map_err(|e| e.to_string())?;
            ensure(out.events.len() == 400 + 199 * 200, || "evaluation count mismatch".into())?;
            report.push(replay_ledger(&out, 1.0, 0.5)?);
        }
    }
    Ok(format!("4 runs replayed exactly, members with non-zero curiosity: {report:?}"))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn qualitative_ranking() -> Outcome {
    let task = TaskKind::Arm.build();
    let seeds = 1..=5u64;
    let selectors = [
        ("random", SelectorConfig::uniform()),
        ("curiosity", SelectorConfig::score(Score::Curiosity)),
        ("no_selection", SelectorConfig::no_selection()),
        ("pop_fitness", SelectorConfig::population(Score::Fitness)),
    ];
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (prefix, container) in [("grid", ContainerKind::Grid), ("arch", ContainerKind::Archive)] {
        let mut totals: HashMap<&str, Vec<f64>> = HashMap::new();
        for (name, sel) in &selectors {
            for seed in seeds.clone() {
                let cfg = arm_config(container, sel.clone(), 2000, seed).with_log_interval(2000);
                let out = run_qd(&cfg, task.as_ref()).map_err(|e| e.to_string())?;
                totals.entry(name).or_default().push(out.trace.last().unwrap().total_quality);
            }
        }
        for better in ["random", "curiosity"] {
            for worse in ["no_selection", "pop_fitness"] {
                let wins = totals[better].iter().zip(&totals[worse]).filter(|(a, b)| a > b).count();
                let mb = median(&mut totals[better].clone());
                let mw = median(&mut totals[worse].clone());
                let verdict = format!("{prefix}_{better} > {prefix}_{worse}: {wins}/5 seeds, medians {mb:.1} vs {mw:.1}");
                if wins < 4 || mb <= mw {
                    failures.push(verdict.clone());
                }
                lines.push(verdict);
            }
        }
    }
    if failures.is_empty() {
        Ok(lines.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn arm_kinematics() -> Outcome {
    let arm = RedundantArm::default();
    let genotype = |v: Vec<f64>| Genotype::new(v, Encoding::Continuous).unwrap();
    let gripper = |d: &Descriptor| (d.coords()[0] * 2.2 - 1.1, d.coords()[1] * 2.2 - 1.1);
    for i in 0..=100 {
        let g = i as f64 / 100.0;
        let (desc, fitness) = arm.evaluate(&genotype(vec![g; 8]))?;
        ensure(fitness == 0.0, || format!("equal genes {g} give fitness {fitness}"))?;
        // Eight equal links at cumulative headings a, 2a, ..., 8a sum to a
        // point at heading 4.5a and signed distance sin(4a) / (8 sin(a/2)).
        let a = (g - 0.5) * std::f64::consts::PI;
        let r = if a == 0.0 { 1.0 } else { (4.0 * a).sin() / (8.0 * (a / 2.0).sin()) };
        let (x, y) = gripper(&desc);
        let (ex, ey) = (r * (4.5 * a).cos(), r * (4.5 * a).sin());
        ensure((x - ex).abs() < 1e-12 && (y - ey).abs() < 1e-12, || {
            format!("gripper ({x}, {y}) off the equal-angle curve ({ex}, {ey})")
        })?;
    }
    let (_, alt) = arm.evaluate(&genotype((0..8).map(|i| (i % 2) as f64).collect()))?;
    ensure(alt == -0.25, || format!("alternating genotype fitness {alt}"))?;
    let (mid, _) = arm.evaluate(&genotype(vec![0.5; 8]))?;
    let expected = [2.1 / 2.2, 0.5];
    ensure(
        (mid.coords()[0] - expected[0]).abs() < 1e-9 && (mid.coords()[1] - expected[1]).abs() < 1e-9,
        || format!("straight arm descriptor {:?}", mid.coords()),
    )?;
    ensure(format!("{:.5}", mid.coords()[0]) == "0.95455", || "descriptor does not round to 0.95455".into())?;
    Ok(format!(
        "101 equal-angle arms on the curve with fitness 0, alternating -0.25, straight arm ({:.9}, {:.9})",
        mid.coords()[0],
        mid.coords()[1]
    ))
}

fn max_quality_attainment() -> Outcome {
    let task = TaskKind::Arm.build();
    let mut best = Vec::new();
    for seed in 1..=5 {
        let cfg = arm_config(ContainerKind::Grid, SelectorConfig::uniform(), 1000, seed).with_log_interval(1000);
        let out = run_qd(&cfg, task.as_ref()).map_err(|e| e.to_string())?;
        best.push(out.trace.last().unwrap().max_quality.unwrap_or(f64::NEG_INFINITY));
    }
    let m = median(&mut best.clone());
    ensure(m >= -0.01, || format!("median max_quality {m} < -0.01 ({best:?})"))?;
    Ok(format!("median max_quality {m:.3e} >= -0.01 over 5 seeds"))
}

fn qd(args: &[&str], threads: &str) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qd"))
        .args(args)
        .env("QD_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("qd {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim())
    })
}

fn read(dir: &Path, file: &str) -> Result<Vec<u8>, String> {
    fs::read(dir.join(file)).map_err(|e| format!("{}: {e}", dir.join(file).display()))
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checked = Vec::new();
    for variant in ["grid_curiosity", "arch_pareto", "nslc"] {
        let dirs: Vec<_> = ["a", "b", "t"].iter().map(|s| tmp.path().join(format!("{variant}_{s}"))).collect();
        for (dir, threads) in dirs.iter().zip(["0", "0", "4"]) {
            let d = dir.to_str().unwrap();
            qd(&["run", "--variant", variant, "--iterations", "60", "--seed", "11", "--out", d], threads)?;
        }
        for file in ["metrics.csv", "collection.csv"] {
            ensure(read(&dirs[0], file)? == read(&dirs[1], file)?, || format!("{variant}: serial {file} differs"))?;
        }
        ensure(read(&dirs[0], "collection.csv")? == read(&dirs[2], "collection.csv")?, || {
            format!("{variant}: threaded collection differs from serial")
        })?;
        checked.push(variant);
    }
    Ok(format!("serial reruns byte-identical and 4-thread collections equal serial for {checked:?}"))
}

fn variant_matrix() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for v in VARIANTS.iter().filter(|v| v.headline) {
        for task in ["arm", "synthetic6"] {
            let dir = tmp.path().join(format!("{}_{task}", v.name));
            qd(&["run", "--variant", v.name, "--task", task, "--iterations", "50", "--out", dir.to_str().unwrap()], "0")?;
            let mut expected = vec!["config.json", "metrics.csv", "collection.csv"];
            if task == "arm" {
                expected.push("collection.svg");
            }
            for f in expected {
                ensure(dir.join(f).is_file(), || format!("{} on {task}: {f} missing", v.name))?;
            }
            let metrics = String::from_utf8(read(&dir, "metrics.csv")?).unwrap();
            ensure(metrics.lines().count() == 6, || format!("{} on {task}: expected 5 metric rows", v.name))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs (11 variants x 2 tasks x 50 batches) emitted all artifacts"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("archive spacing", archive_spacing),
        ("oracle equivalence", oracle_equivalence),
        ("exclusive epsilon-dominance", epsilon_dominance),
        ("grid monotonicity", grid_monotonicity),
        ("curiosity ledger", curiosity_ledger),
        ("qualitative ranking", qualitative_ranking),
        ("arm kinematics", arm_kinematics),
        ("max-quality attainment", max_quality_attainment),
        ("determinism", determinism),
        ("variant matrix", variant_matrix),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:2} {name}: PASS ({secs:.1}s) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} {name}: FAIL ({secs:.1}s) {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
