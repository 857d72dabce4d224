//! Motivation metrics.
//!
//! Two direction metrics judge a bearing by raycast (terrain rise,
//! sight-line depth); three object metrics judge a visible object
//! (hidden space behind it, relative size, clustering). Each returns a
//! score in [0, 1]. `score_direction` blends the active metrics into a
//! single per-direction score: direction metrics apply directly, object
//! metrics take the best object in the direction's bearing bucket, and
//! the result is the arithmetic mean over active metrics.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geom::Vec3;
use crate::perception::{AgentPose, ViewParams};
use crate::world::{Level, WorldError, WorldObject};

/// Neighborhood radius for group detection, in world units.
pub const GROUP_RADIUS: f64 = 40.0;

/// Score added per neighbor in group detection.
pub const GROUP_STEP: f64 = 0.1;

/// Score added per unit of terrain rise in elevation change.
pub const ELEVATION_STEP: f64 = 0.1;

/// Slack for closed distance comparisons.
const DIST_EPS: f64 = 1e-9;

/// The five motivation metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    ElevationChange,
    Openness,
    Anticipation,
    LargeObject,
    Group,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::ElevationChange,
        Metric::Openness,
        Metric::Anticipation,
        Metric::LargeObject,
        Metric::Group,
    ];

    /// Stable identifier used on the command line and in logs.
    pub fn token(self) -> &'static str {
        match self {
            Metric::ElevationChange => "elevation",
            Metric::Openness => "openness",
            Metric::Anticipation => "anticipation",
            Metric::LargeObject => "large-object",
            Metric::Group => "group",
        }
    }

    /// Direction metrics score a bearing; object metrics score a
    /// visible object.
    pub fn is_direction(self) -> bool {
        matches!(self, Metric::ElevationChange | Metric::Openness)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricParseError {
    #[error("unknown metric '{0}' (expected elevation, openness, anticipation, large-object, group, or all)")]
    UnknownMetric(String),
    #[error("metric config must activate at least one metric")]
    Empty,
}

impl FromStr for Metric {
    type Err = MetricParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.token() == s)
            .ok_or_else(|| MetricParseError::UnknownMetric(s.to_string()))
    }
}

/// A nonempty set of active metrics.
///
/// Renders as `all` when every metric is active, otherwise as the
/// active tokens joined with `+` (for example `openness+group`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricConfig {
    active: BTreeSet<Metric>,
}

impl MetricConfig {
    pub fn all() -> Self {
        Self {
            active: Metric::ALL.into_iter().collect(),
        }
    }

    pub fn single(metric: Metric) -> Self {
        Self {
            active: [metric].into_iter().collect(),
        }
    }

    pub fn new(metrics: impl IntoIterator<Item = Metric>) -> Result<Self, MetricParseError> {
        let active: BTreeSet<Metric> = metrics.into_iter().collect();
        if active.is_empty() {
            return Err(MetricParseError::Empty);
        }
        Ok(Self { active })
    }

    pub fn is_active(&self, metric: Metric) -> bool {
        self.active.contains(&metric)
    }

    pub fn active(&self) -> impl Iterator<Item = Metric> + '_ {
        self.active.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn has_object_metric(&self) -> bool {
        self.active.iter().any(|m| !m.is_direction())
    }

    pub fn token(&self) -> String {
        if self.active.len() == Metric::ALL.len() {
            "all".to_string()
        } else {
            let parts: Vec<&str> = self.active.iter().map(|m| m.token()).collect();
            parts.join("+")
        }
    }
}

impl fmt::Display for MetricConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

impl FromStr for MetricConfig {
    type Err = MetricParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(Self::all());
        }
        MetricConfig::new(
            s.split('+')
                .map(Metric::from_str)
                .collect::<Result<Vec<_>, _>>()?,
        )
    }
}

impl Serialize for MetricConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.token())
    }
}

impl<'de> Deserialize<'de> for MetricConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-run metric memory. Only large-object detection needs any: the
/// biggest bounding volume seen so far, which never shrinks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricState {
    pub largest_seen: Option<f64>,
}

/// Scales terrain rise into a score: 0.1 per unit above eye level,
/// saturating at 1.
pub fn elevation_score(delta: f64) -> f64 {
    if delta <= 0.0 {
        0.0
    } else {
        (ELEVATION_STEP * delta).min(1.0)
    }
}

/// How much the terrain climbs in this direction: a terrain-only
/// raycast, scored by how far above eye level the hit point sits.
/// Misses and hits at or below eye level score 0.
pub fn elevation_change(
    level: &Level,
    pose: &AgentPose,
    view: &ViewParams,
    dir: Vec3,
) -> Result<f64, WorldError> {
    let hit = level.raycast_filtered(pose.position, dir, view.view_distance, None, true)?;
    Ok(match hit {
        Some(h) => elevation_score(h.point.y - pose.position.y),
        None => 0.0,
    })
}

/// How far this sight line runs before something stops it, as a
/// fraction of view distance. A ray that hits nothing scores 0, so the
/// metric rewards long-but-bounded vistas over boundless ones.
pub fn openness(
    level: &Level,
    pose: &AgentPose,
    view: &ViewParams,
    dir: Vec3,
) -> Result<f64, WorldError> {
    let hit = level.raycast(pose.position, dir, view.view_distance)?;
    Ok(match hit {
        Some(h) => (h.distance / view.view_distance).min(1.0),
        None => 0.0,
    })
}

/// How much unseen space hides behind the object: the angular shadow
/// the object casts over the remaining view range, as a fraction of
/// half the field of view. Objects at or beyond view distance hide
/// nothing inside it and score 0.
pub fn anticipation_detection(pose: &AgentPose, view: &ViewParams, obj: &WorldObject) -> f64 {
    let d = (obj.position - pose.position).length();
    let l = view.view_distance;
    if d >= l || d <= DIST_EPS {
        return 0.0;
    }
    let extent = obj.size.x.max(obj.size.z);
    let theta = (extent / (2.0 * d)).atan();
    let hidden = theta * (l * l - d * d);
    let denom = (view.fov_deg.to_radians() / 2.0) * l * l;
    (hidden / denom).min(1.0)
}

/// How big the object is next to the biggest ever seen this run.
/// Anything at least as big scores 1 and becomes the new benchmark.
pub fn large_object_detection(state: &mut MetricState, obj: &WorldObject) -> f64 {
    let volume = obj.volume();
    match state.largest_seen {
        Some(largest) if volume < largest => volume / largest,
        _ => {
            state.largest_seen = Some(volume);
            1.0
        }
    }
}

/// How clustered the object is: 0.1 per other object within 40 units
/// of its center, capped at 1.
pub fn group_detection(level: &Level, obj_idx: usize) -> f64 {
    let center = level.objects[obj_idx].position;
    let neighbors = level
        .objects
        .iter()
        .enumerate()
        .filter(|&(i, other)| {
            i != obj_idx && (other.position - center).length() <= GROUP_RADIUS + DIST_EPS
        })
        .count();
    (GROUP_STEP * neighbors as f64).min(1.0)
}

/// One direction's blended score and, when an object metric set the
/// pace, the object that did it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionScore {
    pub score: f64,
    /// Index into `level.objects` of the associated object, present
    /// when the best object-metric contribution beats every
    /// direction-metric contribution.
    pub associated: Option<usize>,
}

/// Scores one direction under the active metrics.
///
/// `bucket` lists the visible objects whose bearing rounds to this
/// direction, nearest first; object metrics take the best object in it
/// (an empty bucket contributes 0). The final score is the arithmetic
/// mean over active metrics, so a single-metric config returns that
/// metric's raw value.
pub fn score_direction(
    config: &MetricConfig,
    state: &mut MetricState,
    level: &Level,
    pose: &AgentPose,
    view: &ViewParams,
    dir: Vec3,
    bucket: &[usize],
) -> Result<DirectionScore, WorldError> {
    let mut sum = 0.0;
    let mut dir_best = f64::NEG_INFINITY;
    let mut obj_best = f64::NEG_INFINITY;
    let mut obj_best_idx = None;
    for metric in config.active() {
        let value = match metric {
            Metric::ElevationChange => {
                let v = elevation_change(level, pose, view, dir)?;
                dir_best = dir_best.max(v);
                v
            }
            Metric::Openness => {
                let v = openness(level, pose, view, dir)?;
                dir_best = dir_best.max(v);
                v
            }
            Metric::Anticipation | Metric::LargeObject | Metric::Group => {
                let mut best: f64 = 0.0;
                for &idx in bucket {
                    let v = match metric {
                        Metric::Anticipation => {
                            anticipation_detection(pose, view, &level.objects[idx])
                        }
                        Metric::LargeObject => {
                            large_object_detection(state, &level.objects[idx])
                        }
                        Metric::Group => group_detection(level, idx),
                        _ => unreachable!(),
                    };
                    // Strict comparison keeps the nearest object on ties.
                    if v > obj_best {
                        obj_best = v;
                        obj_best_idx = Some(idx);
                    }
                    best = best.max(v);
                }
                best
            }
        };
        sum += value;
    }
    let score = sum / config.len() as f64;
    let associated = if obj_best > dir_best {
        obj_best_idx
    } else {
        None
    };
    Ok(DirectionScore { score, associated })
}
