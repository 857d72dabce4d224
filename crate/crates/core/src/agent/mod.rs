//! The exploratory agent.
//!
//! Each decision builds an interest map: every visible object is
//! bucketed by bearing, each in-view direction is scored under the
//! active metrics, and the best direction wins (ties resolved with the
//! run's seeded generator). The agent then commits to either walking 50
//! units that way or navigating to the direction's associated object,
//! re-deciding every second or as soon as the commitment ends. A
//! commitment that dies without moving marks its direction as a dead
//! end; dead ends sit out decisions until the agent moves again, so a
//! cornered agent turns instead of re-picking the same blocked
//! direction forever. A random control agent shares the locomotion but
//! picks directions uniformly and scores nothing.

mod trace;

pub use trace::{
    DecisionRecord, TickRecord, TraceError, TraceEvent, TraceHeader, TraceLog,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Vec3;
use crate::metrics::{score_direction, MetricConfig, MetricState};
use crate::perception::{
    fan_direction, nearest_fan_slot, sample_fan, visible_objects, AgentPose, ViewParams,
    EYE_HEIGHT, FAN_COUNT,
};
use crate::rng::Rng;
use crate::world::{Level, PathError, WorldError};

/// Simulation step, in seconds.
pub const TICK_DT: f64 = 0.1;

/// An agent arrives at an object when it gets within this horizontal
/// distance of its center; close enough to inspect, short of collision.
pub const ARRIVE_DISTANCE: f64 = 10.0;

/// Locomotion and scheduling knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentParams {
    pub view: ViewParams,
    /// Seconds between scheduled decisions.
    pub decision_time: f64,
    /// Distance commitment of a plain directional move, in units.
    pub move_distance: f64,
    /// Walking speed, units per second.
    pub speed: f64,
    /// Episode length, in seconds.
    pub sim_duration: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            view: ViewParams::default(),
            decision_time: 1.0,
            move_distance: 50.0,
            speed: 10.0,
            sim_duration: 180.0,
        }
    }
}

/// What drives the agent's decisions.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentKind {
    /// Scores directions with the given metrics and follows the best.
    Explorer(MetricConfig),
    /// Picks a uniformly random in-view direction each decision.
    RandomControl,
}

impl AgentKind {
    /// Stable identifier used in trace headers and file names.
    pub fn token(&self) -> String {
        match self {
            AgentKind::Explorer(config) => config.token(),
            AgentKind::RandomControl => "random".to_string(),
        }
    }

    pub fn parse(s: &str) -> Result<Self, crate::metrics::MetricParseError> {
        if s == "random" {
            Ok(AgentKind::RandomControl)
        } else {
            Ok(AgentKind::Explorer(s.parse()?))
        }
    }
}

/// Per-direction scores for one decision. Out-of-view slots hold
/// negative infinity so they can never win.
#[derive(Debug, Clone)]
pub struct InterestMap {
    pub scores: [f64; FAN_COUNT],
    /// Object index tied to the slot, when an object metric set its
    /// score.
    pub associated: [Option<usize>; FAN_COUNT],
}

impl InterestMap {
    /// Slots sharing the maximum score, in slot order.
    pub fn best_slots(&self) -> Vec<usize> {
        let max = self.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..FAN_COUNT).filter(|&i| self.scores[i] == max).collect()
    }
}

/// Scores every in-view direction under the active metrics. Visible
/// objects join the bucket of their rounded bearing; an object whose
/// bearing rounds to an out-of-view slot contributes nothing this
/// decision.
pub fn build_interest_map(
    level: &Level,
    pose: &AgentPose,
    view: &ViewParams,
    config: &MetricConfig,
    state: &mut MetricState,
) -> Result<InterestMap, WorldError> {
    let fan = sample_fan(pose.heading_deg, view);
    let visible = visible_objects(level, pose, view)?;
    let mut buckets: [Vec<usize>; FAN_COUNT] = std::array::from_fn(|_| Vec::new());
    for idx in visible {
        // `visible` is sorted near to far, so buckets stay nearest-first.
        let to = level.objects[idx].position - pose.position;
        let flat = Vec3::new(to.x, 0.0, to.z);
        let bearing = if flat.length() <= 1e-9 {
            pose.heading_deg
        } else {
            flat.z.atan2(flat.x).to_degrees()
        };
        buckets[nearest_fan_slot(bearing)].push(idx);
    }
    let mut scores = [f64::NEG_INFINITY; FAN_COUNT];
    let mut associated = [None; FAN_COUNT];
    for slot in 0..FAN_COUNT {
        if !fan.in_fov[slot] {
            continue;
        }
        let ds = score_direction(
            config,
            state,
            level,
            pose,
            view,
            fan_direction(slot),
            &buckets[slot],
        )?;
        scores[slot] = ds.score;
        associated[slot] = ds.associated;
    }
    Ok(InterestMap { scores, associated })
}

/// An active movement commitment.
#[derive(Debug, Clone)]
enum Plan {
    /// Walk up to `remaining` units along `dir`.
    Direction { dir: Vec3, remaining: f64 },
    /// Follow `waypoints` toward object `target`.
    Path {
        waypoints: Vec<Vec3>,
        next: usize,
        target: usize,
    },
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("spawn ({x:.1}, {z:.1}) is not on walkable ground")]
    UnwalkableSpawn { x: f64, z: f64 },
    #[error("agent params invalid: {0}")]
    BadParams(String),
}

/// Runs one full episode and returns its trace.
///
/// Fully deterministic in (level, spawn, kind, params, seed): ticks
/// advance in fixed 0.1 s steps, decisions fire every `decision_time`
/// and whenever a commitment ends early, and all randomness (initial
/// heading, tie-breaks, random-control picks) flows from `seed`.
pub fn run_episode(
    level: &Level,
    spawn_x: f64,
    spawn_z: f64,
    kind: &AgentKind,
    params: &AgentParams,
    seed: u64,
) -> Result<TraceLog, AgentError> {
    validate_params(params)?;
    let (sx, sz) = match level.nav.snap(spawn_x, spawn_z) {
        Some(cell) => {
            let (cx, cz) = level.nav.center_of(cell.0, cell.1);
            (cx, cz)
        }
        None => {
            return Err(AgentError::UnwalkableSpawn {
                x: spawn_x,
                z: spawn_z,
            })
        }
    };
    let mut rng = Rng::from_seed(seed);
    let mut pose = AgentPose {
        position: Vec3::new(sx, level.ground_height(sx, sz) + EYE_HEIGHT, sz),
        heading_deg: rng.range_f64(0.0, 360.0),
    };
    let header = TraceHeader {
        level_id: level.id.clone(),
        agent: kind.token(),
        seed,
        spawn: pose.position,
        params: *params,
    };

    let ticks_per_decision = ((params.decision_time / TICK_DT).round() as usize).max(1);
    let total_ticks = (params.sim_duration / TICK_DT).round() as usize;
    let mut events = Vec::with_capacity(total_ticks + total_ticks / ticks_per_decision + 8);
    let mut memory = Memory {
        state: MetricState::default(),
        rng,
        dead_ends: [false; FAN_COUNT],
    };
    let mut plan: Option<Plan> = None;
    let mut last_slot = 0usize;

    for tick in 0..total_ticks {
        let now = tick as f64 * TICK_DT;
        if tick % ticks_per_decision == 0 || plan.is_none() {
            let (record, new_plan) = decide(level, &pose, kind, params, &mut memory, now)?;
            last_slot = record.direction;
            events.push(TraceEvent::Decision(record));
            plan = new_plan;
        }
        let before = pose.position;
        plan = advance(level, &mut pose, plan, params)?;
        if pose.position.horizontal_distance(before) > 1e-12 {
            memory.dead_ends = [false; FAN_COUNT];
        } else if plan.is_none() {
            memory.dead_ends[last_slot] = true;
        }
        let end = (tick + 1) as f64 * TICK_DT;
        let visible = visible_objects(level, &pose, &params.view)?
            .into_iter()
            .map(|i| level.objects[i].id.clone())
            .collect();
        events.push(TraceEvent::Tick(TickRecord {
            time: end,
            position: pose.position,
            heading_deg: pose.heading_deg,
            visible,
        }));
    }
    Ok(TraceLog { header, events })
}

/// Runs the unscored control agent.
pub fn run_random_control(
    level: &Level,
    spawn_x: f64,
    spawn_z: f64,
    params: &AgentParams,
    seed: u64,
) -> Result<TraceLog, AgentError> {
    run_episode(level, spawn_x, spawn_z, &AgentKind::RandomControl, params, seed)
}

fn validate_params(params: &AgentParams) -> Result<(), AgentError> {
    let checks = [
        (params.decision_time > 0.0, "decision_time must be positive"),
        (params.speed > 0.0, "speed must be positive"),
        (params.move_distance > 0.0, "move_distance must be positive"),
        (params.sim_duration > 0.0, "sim_duration must be positive"),
        (params.view.view_distance > 0.0, "view_distance must be positive"),
        (
            params.view.fov_deg > 0.0 && params.view.fov_deg <= 360.0,
            "fov_deg must be in (0, 360]",
        ),
    ];
    for (ok, msg) in checks {
        if !ok {
            return Err(AgentError::BadParams(msg.to_string()));
        }
    }
    Ok(())
}

/// Picks the next commitment and logs it.
fn decide(
    level: &Level,
    pose: &AgentPose,
    kind: &AgentKind,
    params: &AgentParams,
    state: &mut MetricState,
    rng: &mut Rng,
    now: f64,
    dead_ends: &[bool; FAN_COUNT],
) -> Result<(DecisionRecord, Option<Plan>), AgentError> {
    let (slot, motivation, associated) = match kind {
        AgentKind::Explorer(config) => {
            let map = build_interest_map(level, pose, &params.view, config, state)?;
            let mut masked = map.clone();
            for (s, dead) in dead_ends.iter().enumerate() {
                if *dead {
                    masked.scores[s] = f64::NEG_INFINITY;
                }
            }
            let best = masked.best_slots();
            debug_assert!(!best.is_empty(), "FOV covers at least one slot");
            if masked.scores[best[0]].is_finite() {
                let slot = if best.len() == 1 {
                    best[0]
                } else {
                    best[rng.usize_below(best.len())]
                };
                (slot, Some(map.scores[slot]), map.associated[slot])
            } else {
                // Every in-view direction is a known dead end: turn
                // toward an untried one (often behind) and walk blind.
                let fresh: Vec<usize> =
                    (0..FAN_COUNT).filter(|&s| !dead_ends[s]).collect();
                let slot = if fresh.is_empty() {
                    rng.usize_below(FAN_COUNT)
                } else {
                    fresh[rng.usize_below(fresh.len())]
                };
                (slot, Some(0.0), None)
            }
        }
        AgentKind::RandomControl => {
            let fan = sample_fan(pose.heading_deg, &params.view);
            let slots: Vec<usize> = fan.slots().collect();
            debug_assert!(!slots.is_empty());
            (slots[rng.usize_below(slots.len())], None, None)
        }
    };

    let mut object_id = None;
    let plan = match associated {
        // Navigating to an object we already stand next to would stall
        // the run; walk the chosen direction instead.
        Some(target)
            if pose
                .position
                .horizontal_distance(level.objects[target].position)
                > ARRIVE_DISTANCE =>
        {
            let goal = level.objects[target].position;
            match level.find_path(pose.position, goal) {
                // A single-waypoint route means the goal snapped back to
                // the agent's own cell; it cannot move us.
                Ok(waypoints) if waypoints.len() > 1 => {
                    object_id = Some(level.objects[target].id.clone());
                    Some(Plan::Path {
                        waypoints,
                        next: 0,
                        target,
                    })
                }
                // Unreachable object: fall back to walking the
                // direction that scored it.
                Ok(_) | Err(PathError::NoPath) | Err(PathError::OutOfBounds { .. }) => {
                    Some(direction_plan(slot, params))
                }
            }
        }
        _ => Some(direction_plan(slot, params)),
    };
    let record = DecisionRecord {
        time: now,
        direction: slot,
        motivation,
        object: object_id,
    };
    Ok((record, plan))
}

fn direction_plan(slot: usize, params: &AgentParams) -> Plan {
    Plan::Direction {
        dir: fan_direction(slot),
        remaining: params.move_distance,
    }
}

/// Moves the pose one tick along the plan. Returns the surviving plan,
/// or None when the commitment ended (arrived, exhausted, or blocked)
/// so the next tick opens with a fresh decision.
fn advance(
    level: &Level,
    pose: &mut AgentPose,
    plan: Option<Plan>,
    params: &AgentParams,
) -> Result<Option<Plan>, AgentError> {
    let step = params.speed * TICK_DT;
    match plan {
        None => Ok(None),
        Some(Plan::Direction { dir, remaining }) => {
            let len = step.min(remaining);
            if len <= 0.0 {
                return Ok(None);
            }
            match try_move(level, pose, dir * len)? {
                Some(moved) => {
                    let left = remaining - moved;
                    if left > 1e-9 {
                        Ok(Some(Plan::Direction { dir, remaining: left }))
                    } else {
                        Ok(None)
                    }
                }
                None => Ok(None),
            }
        }
        Some(Plan::Path {
            waypoints,
            mut next,
            target,
        }) => {
            let goal = level.objects[target].position;
            if pose.position.horizontal_distance(goal) <= ARRIVE_DISTANCE {
                return Ok(None);
            }
            while next < waypoints.len() {
                let wp = waypoints[next];
                if pose.position.horizontal_distance(wp) > 1e-9 {
                    break;
                }
                next += 1;
            }
            if next >= waypoints.len() {
                return Ok(None);
            }
            let wp = waypoints[next];
            let to = Vec3::new(wp.x - pose.position.x, 0.0, wp.z - pose.position.z);
            let dist = to.length();
            let len = step.min(dist);
            let dir = to * (1.0 / dist);
            match try_move(level, pose, dir * len)? {
                Some(_) => {
                    if pose.position.horizontal_distance(goal) <= ARRIVE_DISTANCE {
                        Ok(None)
                    } else {
                        Ok(Some(Plan::Path {
                            waypoints,
                            next,
                            target,
                        }))
                    }
                }
                // Path cells are walkable by construction; a blocked
                // path step means numeric drift, so re-decide.
                None => Ok(None),
            }
        }
    }
}

/// Attempts a horizontal displacement, sliding along one axis when the
/// full step lands on unwalkable ground. Returns the distance actually
/// moved, or None when fully blocked (pose untouched). On success the
/// pose's height follows the terrain and the heading follows the
/// motion.
fn try_move(
    level: &Level,
    pose: &mut AgentPose,
    delta: Vec3,
) -> Result<Option<f64>, AgentError> {
    let candidates = [
        Vec3::new(delta.x, 0.0, delta.z),
        // Axis slides, larger component first.
        if delta.x.abs() >= delta.z.abs() {
            Vec3::new(delta.x, 0.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, delta.z)
        },
        if delta.x.abs() >= delta.z.abs() {
            Vec3::new(0.0, 0.0, delta.z)
        } else {
            Vec3::new(delta.x, 0.0, 0.0)
        },
    ];
    for cand in candidates {
        let moved = cand.length();
        if moved <= 1e-12 {
            continue;
        }
        let nx = pose.position.x + cand.x;
        let nz = pose.position.z + cand.z;
        if !level.point_walkable(nx, nz) {
            continue;
        }
        pose.position = Vec3::new(nx, level.ground_height(nx, nz) + EYE_HEIGHT, nz);
        pose.heading_deg = crate::geom::normalize_deg(cand.z.atan2(cand.x).to_degrees());
        return Ok(Some(moved));
    }
    Ok(None)
}
