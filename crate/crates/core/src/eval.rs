//! Trajectory evaluation and the gated fitness function.
//!
//! Everything here reads stored traces, never live simulator state:
//! coverage, inspection, entropy, and novelty are recomputable from a
//! trace alone (plus the level for object positions), and the fitness
//! function combines spawn-averaged episode scores across the six
//! metric configurations into one number per level.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{TraceLog, TICK_DT};
use crate::metrics::{Metric, MetricConfig};
use crate::wfcgen::{GRID_DIM, TILE_SIZE};
use crate::world::Level;

/// Coverage region edge length; regions coincide with tiles.
pub const REGION_SIZE: f64 = TILE_SIZE;

/// Number of coverage regions in a level.
pub const REGION_COUNT: usize = GRID_DIM * GRID_DIM;

/// Horizontal distance at which a pass counts as inspecting an object.
pub const INSPECT_DISTANCE: f64 = 10.0;

/// Knobs of the novelty recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoveltyParams {
    /// Recovery rate, score per second.
    pub rate: f64,
    /// Ceiling and first-sight value of a kind's novelty.
    pub max: f64,
    /// One-off penalty applied the tick a kind is first sighted.
    pub penalty: f64,
}

impl Default for NoveltyParams {
    fn default() -> Self {
        Self {
            rate: 0.03,
            max: 0.1,
            penalty: 0.1,
        }
    }
}

/// Evaluation knobs shared by the whole battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalParams {
    pub novelty: NoveltyParams,
    /// Region count used to normalize entropy to [0, 1].
    pub entropy_regions: usize,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            novelty: NoveltyParams::default(),
            entropy_regions: REGION_COUNT,
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("motivation is undefined for a random-control trace")]
    RandomControlMotivation,
    #[error("trace has no decision records")]
    NoDecisions,
    #[error("config '{0}' has episodes without motivation samples")]
    MissingMotivation(String),
    #[error("config '{0}' has no episode results")]
    EmptyResults(String),
    #[error("missing results for configs: {}", .0.join(", "))]
    MissingConfigs(Vec<String>),
    #[error("fitness weights must sum to 1, got {0}")]
    InvalidWeights(f64),
}

/// Region containing a world point, clamped to the grid at the far
/// boundary.
pub fn region_of(x: f64, z: f64) -> (usize, usize) {
    let clamp = |v: f64| (((v / REGION_SIZE).floor() as isize).max(0) as usize).min(GRID_DIM - 1);
    (clamp(x), clamp(z))
}

/// Tick-visit counts per region, row-major by (z, x).
pub fn region_counts(trace: &TraceLog) -> [u64; REGION_COUNT] {
    let mut counts = [0u64; REGION_COUNT];
    for t in trace.ticks() {
        let (rx, rz) = region_of(t.position.x, t.position.z);
        counts[rz * GRID_DIM + rx] += 1;
    }
    counts
}

/// Fraction of regions the agent touched.
pub fn coverage(trace: &TraceLog) -> f64 {
    let visited = region_counts(trace).iter().filter(|&&c| c > 0).count();
    visited as f64 / REGION_COUNT as f64
}

/// Fraction of the level's objects the agent came within 10 horizontal
/// units of. A level without objects scores 0.
pub fn inspection(trace: &TraceLog, level: &Level) -> f64 {
    if level.objects.is_empty() {
        return 0.0;
    }
    let inspected = level
        .objects
        .iter()
        .filter(|obj| {
            trace
                .ticks()
                .any(|t| t.position.horizontal_distance(obj.position) <= INSPECT_DISTANCE)
        })
        .count();
    inspected as f64 / level.objects.len() as f64
}

/// Shannon entropy of the region-visit distribution, in bits.
pub fn region_entropy_bits(trace: &TraceLog) -> f64 {
    let counts = region_counts(trace);
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let bits: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum();
    // A single-region distribution sums to -0.0; keep reports at +0.0.
    bits + 0.0
}

/// Entropy normalized to [0, 1] by the maximum over `entropy_regions`
/// equally likely regions.
pub fn region_entropy(trace: &TraceLog, params: &EvalParams) -> f64 {
    let denom = (params.entropy_regions.max(2) as f64).log2();
    (region_entropy_bits(trace) / denom).clamp(0.0, 1.0)
}

/// Object kind named by an id: the prefix before the first dot, or the
/// whole id when it has none.
fn kind_of(id: &str) -> &str {
    id.split('.').next().unwrap_or(id)
}

struct KindNovelty {
    value: f64,
    penalized: bool,
}

/// Per-tick novelty values, recomputed from the trace's visibility
/// stream.
///
/// Each object kind holds a novelty value in [0, max]. A kind first
/// sighted contributes `max` that tick and is then penalized once;
/// afterwards it recovers at `rate` per second whether watched or not.
/// The tick value sums the pre-update values of the kinds in sight, so
/// it can transiently exceed 1 when many kinds debut at once.
pub fn novelty_series(trace: &TraceLog, params: &NoveltyParams) -> Vec<f64> {
    let mut kinds: BTreeMap<&str, KindNovelty> = BTreeMap::new();
    let mut series = Vec::new();
    let step = params.rate * TICK_DT;
    for tick in trace.ticks() {
        let visible: BTreeSet<&str> = tick.visible.iter().map(|id| kind_of(id)).collect();
        let mut value = 0.0;
        for &kind in &visible {
            let entry = kinds.entry(kind).or_insert(KindNovelty {
                value: params.max,
                penalized: false,
            });
            value += entry.value;
        }
        series.push(value);
        for (kind, entry) in kinds.iter_mut() {
            if visible.contains(kind) && !entry.penalized {
                entry.value = (entry.value - params.penalty).max(0.0);
                entry.penalized = true;
            } else {
                entry.value = (entry.value + step).min(params.max);
            }
        }
    }
    series
}

/// Mean per-tick novelty, clamped to [0, 1].
pub fn novelty_avg(trace: &TraceLog, params: &NoveltyParams) -> f64 {
    let series = novelty_series(trace, params);
    if series.is_empty() {
        return 0.0;
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    mean.clamp(0.0, 1.0)
}

/// Mean decision motivation. Random-control traces have none and
/// error.
pub fn motivation_avg(trace: &TraceLog) -> Result<f64, EvalError> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for d in trace.decisions() {
        match d.motivation {
            Some(v) => {
                sum += v;
                n += 1;
            }
            None => return Err(EvalError::RandomControlMotivation),
        }
    }
    if n == 0 {
        return Err(EvalError::NoDecisions);
    }
    Ok(sum / n as f64)
}

/// One episode's summary numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeScores {
    pub coverage: f64,
    pub inspection: f64,
    pub entropy: f64,
    pub novelty: f64,
    /// Absent for the random control agent.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub motivation: Option<f64>,
}

/// Scores a stored trace against its level.
pub fn evaluate_episode(trace: &TraceLog, level: &Level, params: &EvalParams) -> EpisodeScores {
    let motivation = if trace.header.agent == "random" {
        None
    } else {
        motivation_avg(trace).ok()
    };
    EpisodeScores {
        coverage: coverage(trace),
        inspection: inspection(trace, level),
        entropy: region_entropy(trace, params),
        novelty: novelty_avg(trace, &params.novelty),
        motivation,
    }
}

/// Fitness weighting. The five single-metric configs and the
/// all-metrics config must weigh 1 in total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitnessParams {
    pub single_weight: f64,
    pub all_weight: f64,
}

impl Default for FitnessParams {
    fn default() -> Self {
        Self {
            single_weight: 0.1,
            all_weight: 0.5,
        }
    }
}

/// Gate bounds on spawn-averaged scores. Coverage must land inside
/// [0.20, 0.80]; entropy must stay at or below 0.9; inspection must
/// exceed 0.10 and stay at or below 0.80.
pub const COVERAGE_GATE: (f64, f64) = (0.20, 0.80);
pub const ENTROPY_GATE: f64 = 0.9;
pub const INSPECTION_GATE: (f64, f64) = (0.10, 0.80);

/// Gate outcomes for one config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateFlags {
    pub coverage: bool,
    pub entropy: bool,
    pub inspection: bool,
}

impl GateFlags {
    pub fn all_pass(&self) -> bool {
        self.coverage && self.entropy && self.inspection
    }
}

fn gates(coverage: f64, entropy: f64, inspection: f64) -> GateFlags {
    GateFlags {
        coverage: (COVERAGE_GATE.0..=COVERAGE_GATE.1).contains(&coverage),
        entropy: entropy <= ENTROPY_GATE,
        inspection: inspection > INSPECTION_GATE.0 && inspection <= INSPECTION_GATE.1,
    }
}

/// One config's spawn-averaged line in a fitness report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRow {
    pub config: String,
    pub spawns: usize,
    pub coverage: f64,
    pub entropy: f64,
    pub inspection: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub motivation: Option<f64>,
    pub novelty: f64,
    pub gates: GateFlags,
    pub weight: f64,
    pub fitness: f64,
}

/// Per-level fitness: one row per config plus the weighted total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub level_id: String,
    pub rows: Vec<ConfigRow>,
    pub total: f64,
}

impl FitnessReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn row(&self, config: &str) -> Option<&ConfigRow> {
        self.rows.iter().find(|r| r.config == config)
    }
}

/// The six weighted configs, in report order.
pub fn required_configs() -> Vec<MetricConfig> {
    let mut configs: Vec<MetricConfig> =
        Metric::ALL.into_iter().map(MetricConfig::single).collect();
    configs.push(MetricConfig::all());
    configs
}

/// Combines per-config episode scores (one entry per spawn) into the
/// level's fitness.
///
/// Gates apply to the spawn-averaged values; a config passing all
/// three contributes weight times mean motivation times mean novelty.
/// Extra configs (including `random`) are reported with weight 0 and
/// excluded from the total. All six weighted configs must be present.
pub fn fitness(
    level_id: &str,
    results: &BTreeMap<String, Vec<EpisodeScores>>,
    params: &FitnessParams,
) -> Result<FitnessReport, EvalError> {
    let weight_sum = 5.0 * params.single_weight + params.all_weight;
    if (weight_sum - 1.0).abs() > 1e-9 {
        return Err(EvalError::InvalidWeights(weight_sum));
    }
    let required: Vec<String> = required_configs().iter().map(|c| c.token()).collect();
    let missing: Vec<String> = required
        .iter()
        .filter(|token| !results.contains_key(*token))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingConfigs(missing));
    }

    let mut order: Vec<&str> = required.iter().map(|s| s.as_str()).collect();
    for extra in results.keys() {
        if !required.iter().any(|r| r == extra) && extra != "random" {
            order.push(extra);
        }
    }
    if results.contains_key("random") {
        order.push("random");
    }

    let mut rows = Vec::with_capacity(order.len());
    let mut total = 0.0;
    for token in order {
        let episodes = &results[token];
        if episodes.is_empty() {
            return Err(EvalError::EmptyResults(token.to_string()));
        }
        let n = episodes.len() as f64;
        let mean = |f: fn(&EpisodeScores) -> f64| episodes.iter().map(f).sum::<f64>() / n;
        let coverage = mean(|e| e.coverage);
        let entropy = mean(|e| e.entropy);
        let inspection = mean(|e| e.inspection);
        let novelty = mean(|e| e.novelty);
        let weighted = required.iter().any(|r| r == token);
        let motivation = if token == "random" {
            None
        } else {
            if episodes.iter().any(|e| e.motivation.is_none()) {
                if weighted {
                    return Err(EvalError::MissingMotivation(token.to_string()));
                }
                None
            } else {
                Some(mean(|e| e.motivation.unwrap_or(0.0)))
            }
        };
        let gate_flags = gates(coverage, entropy, inspection);
        let weight = if !weighted {
            0.0
        } else if token == "all" {
            params.all_weight
        } else {
            params.single_weight
        };
        let fitness_value = match motivation {
            Some(m) if gate_flags.all_pass() => m * novelty,
            _ => 0.0,
        };
        total += weight * fitness_value;
        rows.push(ConfigRow {
            config: token.to_string(),
            spawns: episodes.len(),
            coverage,
            entropy,
            inspection,
            motivation,
            novelty,
            gates: gate_flags,
            weight,
            fitness: fitness_value,
        });
    }
    Ok(FitnessReport {
        level_id: level_id.to_string(),
        rows,
        total,
    })
}
