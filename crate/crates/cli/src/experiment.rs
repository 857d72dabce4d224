//! Batch simulation: the full agent battery over a set of levels.
//!
//! A battery runs every scoring config (the five single-metric explorers,
//! the all-metrics explorer, and the random control) from every spawn
//! point of every level, then turns the traces into one fitness report
//! per level. Episodes are independent, so they fan out over a thread
//! pool; all seeds derive from the master seed, so results do not depend
//! on worker count or scheduling.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wayfarer_core::agent::{run_episode, AgentKind, TraceLog};
use wayfarer_core::eval::{evaluate_episode, fitness, required_configs, FitnessReport};
use wayfarer_core::rng::{derive_seed, Rng};
use wayfarer_core::wfcgen::WORLD_SIZE;
use wayfarer_core::world::Level;

use crate::config::RunConfig;

/// Minimum pairwise distance between spawn points, in units.
pub const MIN_SPAWN_SEPARATION: f64 = 100.0;

/// Sampling budget per spawn set before giving up on a level.
const SPAWN_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(
        "placed only {got} of {want} spawn points at least {MIN_SPAWN_SEPARATION} units apart"
    )]
    SpawnPlacement { want: usize, got: usize },
}

/// One finished episode.
#[derive(Debug, Clone)]
pub struct EpisodeRun {
    pub config: String,
    pub spawn_index: usize,
    pub seed: u64,
    pub trace: TraceLog,
}

/// Everything a battery produced for one level.
#[derive(Debug)]
pub struct LevelRun {
    pub level_id: String,
    pub spawns: Vec<(f64, f64)>,
    pub episodes: Vec<EpisodeRun>,
    /// Human-readable failure notes; non-empty means partial results.
    pub failures: Vec<String>,
    /// Present when every episode of the level succeeded.
    pub fitness: Option<FitnessReport>,
}

#[derive(Debug)]
pub struct BatteryRun {
    pub master_seed: u64,
    pub spawns_per_level: usize,
    pub levels: Vec<LevelRun>,
}

impl BatteryRun {
    pub fn failed(&self) -> bool {
        self.levels.iter().any(|l| !l.failures.is_empty())
    }
}

/// Config tokens a battery runs, in report order. The random control
/// comes last and carries no fitness weight.
pub fn battery_configs() -> Vec<String> {
    let mut tokens: Vec<String> = required_configs().iter().map(|c| c.token()).collect();
    tokens.push("random".to_string());
    tokens
}

/// Seed for one episode. Streams are disjoint across (level, config,
/// spawn) triples for any realistic battery size, and distinct from the
/// per-level spawn-sampling streams.
pub fn episode_seed(
    master_seed: u64,
    level_index: usize,
    config_index: usize,
    spawn_index: usize,
) -> u64 {
    let stream = level_index as u64 * 1_000_003
        + (config_index as u64 + 1) * 1009
        + spawn_index as u64
        + 1;
    derive_seed(master_seed, stream)
}

/// Marks the cells of the largest 4-connected walkable component.
/// Generated levels can wall off small pockets; an episode spawned
/// inside one would pace a few cells for its whole run, so spawning is
/// restricted to the main component.
fn main_component(level: &Level) -> Vec<bool> {
    let nav = &level.nav;
    let dim = nav.dim();
    let mut label = vec![usize::MAX; dim * dim];
    let mut sizes: Vec<usize> = Vec::new();
    for start in 0..dim * dim {
        if label[start] != usize::MAX || !nav.is_walkable(start % dim, start / dim) {
            continue;
        }
        let id = sizes.len();
        label[start] = id;
        let mut queue = std::collections::VecDeque::from([start]);
        let mut size = 0usize;
        while let Some(cell) = queue.pop_front() {
            size += 1;
            let (ix, iz) = (cell % dim, cell / dim);
            let neighbors = [
                (ix.wrapping_sub(1), iz),
                (ix + 1, iz),
                (ix, iz.wrapping_sub(1)),
                (ix, iz + 1),
            ];
            for (nx, nz) in neighbors {
                if nx >= dim || nz >= dim {
                    continue;
                }
                let n = nz * dim + nx;
                if label[n] == usize::MAX && nav.is_walkable(nx, nz) {
                    label[n] = id;
                    queue.push_back(n);
                }
            }
        }
        sizes.push(size);
    }
    let mut best = usize::MAX;
    let mut best_size = 0;
    for (id, &size) in sizes.iter().enumerate() {
        if size > best_size {
            best = id;
            best_size = size;
        }
    }
    label.into_iter().map(|l| l == best).collect()
}

/// Rejection-samples spawn points on the largest connected patch of
/// walkable ground, pairwise at least [`MIN_SPAWN_SEPARATION`] apart.
/// Deterministic in (level, count, seed).
pub fn pick_spawns(
    level: &Level,
    count: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>, ExperimentError> {
    let main = main_component(level);
    let dim = level.nav.dim();
    let mut rng = Rng::from_seed(seed);
    let mut spawns: Vec<(f64, f64)> = Vec::with_capacity(count);
    for _ in 0..SPAWN_ATTEMPTS {
        if spawns.len() == count {
            break;
        }
        let x = rng.range_f64(0.0, WORLD_SIZE);
        let z = rng.range_f64(0.0, WORLD_SIZE);
        let Some(cell) = level.nav.snap(x, z) else {
            continue;
        };
        if !main[cell.1 * dim + cell.0] {
            continue;
        }
        let (cx, cz) = level.nav.center_of(cell.0, cell.1);
        let far_enough = spawns
            .iter()
            .all(|&(sx, sz)| ((cx - sx).powi(2) + (cz - sz).powi(2)).sqrt() >= MIN_SPAWN_SEPARATION);
        if far_enough {
            spawns.push((cx, cz));
        }
    }
    if spawns.len() < count {
        return Err(ExperimentError::SpawnPlacement {
            want: count,
            got: spawns.len(),
        });
    }
    Ok(spawns)
}

/// Runs the full battery. Failing episodes do not abort the run: their
/// level keeps its successful traces, records the failures, and skips the
/// fitness report.
pub fn run_battery(
    levels: &[Level],
    config: &RunConfig,
    master_seed: u64,
    spawns_per_level: usize,
    workers: usize,
) -> anyhow::Result<BatteryRun> {
    let params = config.agent_params();
    let eval_params = config.eval_params();
    let tokens = battery_configs();
    let kinds: Vec<AgentKind> = tokens
        .iter()
        .map(|t| AgentKind::parse(t).expect("battery configs parse"))
        .collect();

    // Spawn sets first; a level that cannot host them fails whole.
    let mut spawn_sets: Vec<Result<Vec<(f64, f64)>, ExperimentError>> = Vec::new();
    for (li, level) in levels.iter().enumerate() {
        let seed = derive_seed(master_seed, li as u64 * 1_000_003);
        spawn_sets.push(pick_spawns(level, spawns_per_level, seed));
    }

    struct Job {
        level_index: usize,
        config_index: usize,
        spawn_index: usize,
        spawn: (f64, f64),
        seed: u64,
    }
    let mut jobs = Vec::new();
    for (li, spawns) in spawn_sets.iter().enumerate() {
        let Ok(spawns) = spawns else { continue };
        for ci in 0..kinds.len() {
            for (si, &spawn) in spawns.iter().enumerate() {
                jobs.push(Job {
                    level_index: li,
                    config_index: ci,
                    spawn_index: si,
                    spawn,
                    seed: episode_seed(master_seed, li, ci, si),
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    let outcomes: Vec<Result<TraceLog, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                run_episode(
                    &levels[job.level_index],
                    job.spawn.0,
                    job.spawn.1,
                    &kinds[job.config_index],
                    &params,
                    job.seed,
                )
                .map_err(|e| e.to_string())
            })
            .collect()
    });

    let mut runs: Vec<LevelRun> = levels
        .iter()
        .enumerate()
        .map(|(li, level)| LevelRun {
            level_id: level.id.clone(),
            spawns: spawn_sets[li].as_ref().cloned().unwrap_or_default(),
            episodes: Vec::new(),
            failures: match &spawn_sets[li] {
                Ok(_) => Vec::new(),
                Err(e) => vec![e.to_string()],
            },
            fitness: None,
        })
        .collect();

    for (job, outcome) in jobs.iter().zip(outcomes) {
        let run = &mut runs[job.level_index];
        let token = &tokens[job.config_index];
        match outcome {
            Ok(trace) => run.episodes.push(EpisodeRun {
                config: token.clone(),
                spawn_index: job.spawn_index,
                seed: job.seed,
                trace,
            }),
            Err(msg) => run.failures.push(format!(
                "config {token} spawn {}: {msg}",
                job.spawn_index
            )),
        }
    }

    for (li, run) in runs.iter_mut().enumerate() {
        if !run.failures.is_empty() {
            continue;
        }
        let mut results = BTreeMap::new();
        for ep in &run.episodes {
            let scores = evaluate_episode(&ep.trace, &levels[li], &eval_params);
            results
                .entry(ep.config.clone())
                .or_insert_with(Vec::new)
                .push(scores);
        }
        match fitness(&run.level_id, &results, &config.fitness) {
            Ok(report) => run.fitness = Some(report),
            Err(e) => run.failures.push(format!("fitness: {e}")),
        }
    }

    Ok(BatteryRun {
        master_seed,
        spawns_per_level,
        levels: runs,
    })
}

/// Per-level line of `summary.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SummaryLevel {
    pub level_id: String,
    /// Weighted fitness total; absent for partial levels.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub master_seed: u64,
    pub spawns_per_level: usize,
    pub levels: Vec<SummaryLevel>,
}

impl Summary {
    pub fn of(battery: &BatteryRun) -> Summary {
        Summary {
            master_seed: battery.master_seed,
            spawns_per_level: battery.spawns_per_level,
            levels: battery
                .levels
                .iter()
                .map(|run| SummaryLevel {
                    level_id: run.level_id.clone(),
                    total: run.fitness.as_ref().map(|f| f.total),
                    failures: run.failures.len(),
                })
                .collect(),
        }
    }
}

/// Writes a battery under `dir`:
///
/// ```text
/// dir/traces/<level>/<config>_s<spawn>.jsonl
/// dir/fitness/<level>.json            (complete levels)
/// dir/fitness/<level>.partial.json    (failure notes)
/// dir/summary.json
/// ```
pub fn write_outputs(dir: &Path, battery: &BatteryRun) -> anyhow::Result<()> {
    let traces = dir.join("traces");
    let fitness_dir = dir.join("fitness");
    fs::create_dir_all(&traces).with_context(|| format!("creating {}", traces.display()))?;
    fs::create_dir_all(&fitness_dir)
        .with_context(|| format!("creating {}", fitness_dir.display()))?;

    for run in &battery.levels {
        let level_dir = traces.join(&run.level_id);
        fs::create_dir_all(&level_dir)?;
        for ep in &run.episodes {
            let path = level_dir.join(format!("{}_s{}.jsonl", ep.config, ep.spawn_index));
            let file = fs::File::create(&path)
                .with_context(|| format!("creating {}", path.display()))?;
            ep.trace.write_jsonl(BufWriter::new(file))?;
        }
        match &run.fitness {
            Some(report) => {
                let path = fitness_dir.join(format!("{}.json", run.level_id));
                fs::write(&path, report.to_json())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            None => {
                let path = fitness_dir.join(format!("{}.partial.json", run.level_id));
                let note = serde_json::json!({
                    "level_id": run.level_id,
                    "failures": run.failures,
                });
                fs::write(&path, serde_json::to_string_pretty(&note).expect("json"))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }

    let summary = serde_json::to_string_pretty(&Summary::of(battery)).expect("json");
    fs::write(dir.join("summary.json"), summary).context("writing summary.json")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use wayfarer_core::wfcgen::{default_tileset, generate, Preset};
    use wayfarer_core::world::build_level;

    fn level() -> Level {
        let set = default_tileset();
        let tiles = generate(&set, Preset::A, 3).unwrap();
        build_level("a-3", "default", tiles, &set, None).unwrap()
    }

    #[test]
    fn spawns_are_separated_walkable_and_deterministic() {
        let level = level();
        let spawns = pick_spawns(&level, 3, 99).unwrap();
        assert_eq!(spawns, pick_spawns(&level, 3, 99).unwrap());
        assert_eq!(spawns.len(), 3);
        for (i, &(x, z)) in spawns.iter().enumerate() {
            assert!(level.point_walkable(x, z));
            for &(ox, oz) in &spawns[..i] {
                let d = ((x - ox).powi(2) + (z - oz).powi(2)).sqrt();
                assert!(d >= MIN_SPAWN_SEPARATION, "spawns {d} apart");
            }
        }
        assert_ne!(spawns, pick_spawns(&level, 3, 100).unwrap());
    }

    #[test]
    fn spawns_avoid_sealed_pockets() {
        use wayfarer_core::geom::Vec3;
        use wayfarer_core::world::WorldObject;

        // A ring of blocking walls seals off the region around (175, 175);
        // the pocket is walkable inside but unreachable from outside.
        let set = default_tileset();
        let tiles: Vec<_> = (0..7)
            .flat_map(|row| {
                (0..7).map(move |col| wayfarer_core::world::PlacedTile {
                    tile_id: 0,
                    rotation: wayfarer_core::wfcgen::Rotation::R0,
                    row,
                    col,
                })
            })
            .collect();
        let wall = |id: &str, x: f64, z: f64, sx: f64, sz: f64| WorldObject {
            id: id.into(),
            kind: "rock".into(),
            position: Vec3::new(x, 5.0, z),
            size: Vec3::new(sx, 10.0, sz),
            blocking: true,
        };
        let objects = vec![
            wall("rock.n.0", 175.0, 145.0, 70.0, 6.0),
            wall("rock.s.0", 175.0, 205.0, 70.0, 6.0),
            wall("rock.w.0", 145.0, 175.0, 6.0, 70.0),
            wall("rock.e.0", 205.0, 175.0, 6.0, 70.0),
        ];
        let level = build_level("pocket", "default", tiles, &set, Some(objects)).unwrap();
        assert!(level.point_walkable(175.0, 175.0), "pocket interior is walkable");
        for seed in 0..20 {
            for (x, z) in pick_spawns(&level, 3, seed).unwrap() {
                let inside = (150.0..=200.0).contains(&x) && (150.0..=200.0).contains(&z);
                assert!(!inside, "spawn ({x}, {z}) landed in the sealed pocket");
            }
        }
    }

    #[test]
    fn episode_seeds_never_collide_across_the_battery() {
        let mut seen = std::collections::HashSet::new();
        for li in 0..10 {
            for ci in 0..7 {
                for si in 0..5 {
                    assert!(seen.insert(episode_seed(1, li, ci, si)));
                }
            }
        }
    }

    #[test]
    fn battery_covers_every_config_and_spawn() {
        let level = level();
        let mut config = RunConfig::default();
        config.agent.sim_duration = 2.0;
        let battery = run_battery(&[level], &config, 1, 2, 2).unwrap();
        assert!(!battery.failed());
        let run = &battery.levels[0];
        assert_eq!(run.episodes.len(), battery_configs().len() * 2);
        let report = run.fitness.as_ref().expect("fitness present");
        assert_eq!(report.rows.len(), 7);
        assert_eq!(report.rows.last().unwrap().config, "random");
    }
}
