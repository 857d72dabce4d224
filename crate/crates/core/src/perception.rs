//! Agent senses: a fixed fan of view directions plus object visibility.
//!
//! Directions are world-frame, not head-frame: the fan is the same 36
//! compass bearings every tick and the field of view selects a
//! contiguous arc of them around the current heading. Scoring therefore
//! compares like with like across ticks.

use serde::{Deserialize, Serialize};

use crate::geom::{ang_sep_deg, normalize_deg, Vec3};
use crate::world::{Level, WorldError};

/// Height of the agent's eye above the ground it stands on.
pub const EYE_HEIGHT: f64 = 2.0;

/// Number of fan directions (every 10 degrees of bearing).
pub const FAN_COUNT: usize = 36;

/// Angular spacing between adjacent fan directions, in degrees.
pub const FAN_STEP_DEG: f64 = 360.0 / FAN_COUNT as f64;

/// Slack for closed comparisons against the field-of-view boundary.
const FOV_EPS: f64 = 1e-9;

/// View-distance and field-of-view settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViewParams {
    /// Maximum sight distance in world units.
    pub view_distance: f64,
    /// Full field-of-view angle in degrees, centred on the heading.
    pub fov_deg: f64,
}

impl Default for ViewParams {
    fn default() -> Self {
        Self {
            view_distance: 115.0,
            fov_deg: 90.0,
        }
    }
}

/// Where the agent stands and faces. `heading_deg` is a compass bearing
/// measured from +x toward +z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentPose {
    pub position: Vec3,
    pub heading_deg: f64,
}

/// Bearing of fan slot `i`, in degrees.
pub fn fan_angle_deg(i: usize) -> f64 {
    debug_assert!(i < FAN_COUNT);
    i as f64 * FAN_STEP_DEG
}

/// Unit direction of fan slot `i` in the horizontal plane.
pub fn fan_direction(i: usize) -> Vec3 {
    let rad = fan_angle_deg(i).to_radians();
    Vec3::new(rad.cos(), 0.0, rad.sin())
}

/// Fan slot whose bearing is closest to `deg` (wrapping).
pub fn nearest_fan_slot(deg: f64) -> usize {
    let norm = normalize_deg(deg);
    ((norm / FAN_STEP_DEG).round() as usize) % FAN_COUNT
}

/// Which fan slots fall inside the field of view for a given heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionFan {
    pub in_fov: [bool; FAN_COUNT],
}

impl DirectionFan {
    /// Slots inside the arc, in fan order.
    pub fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..FAN_COUNT).filter(move |&i| self.in_fov[i])
    }

    pub fn count(&self) -> usize {
        self.in_fov.iter().filter(|&&b| b).count()
    }
}

/// Marks every fan slot within half the field of view of the heading.
/// The boundary is inclusive, so a 90 degree arc covers nine slots when
/// the heading sits on a fan bearing and ten when it sits midway
/// between two (both boundary slots land exactly on the arc edge).
pub fn sample_fan(heading_deg: f64, view: &ViewParams) -> DirectionFan {
    let mut in_fov = [false; FAN_COUNT];
    let half = view.fov_deg / 2.0;
    for (i, flag) in in_fov.iter_mut().enumerate() {
        *flag = ang_sep_deg(fan_angle_deg(i), heading_deg) <= half + FOV_EPS;
    }
    // A sub-10-degree field of view could otherwise select no slot at
    // all; the slot nearest the heading always counts as visible.
    in_fov[nearest_fan_slot(heading_deg)] = true;
    DirectionFan { in_fov }
}

/// Indices into `level.objects` of everything the agent can currently
/// see: inside the view cone, within view distance, and not hidden
/// behind terrain or another blocking object. Sorted near to far, ties
/// by index.
pub fn visible_objects(
    level: &Level,
    pose: &AgentPose,
    view: &ViewParams,
) -> Result<Vec<usize>, WorldError> {
    let mut hits: Vec<(f64, usize)> = Vec::new();
    let half = view.fov_deg / 2.0;
    for (idx, obj) in level.objects.iter().enumerate() {
        let to = obj.position - pose.position;
        let dist = to.length();
        if dist > view.view_distance + FOV_EPS {
            continue;
        }
        // Angular test is horizontal: looking up or down at something
        // straight ahead still counts as ahead.
        let flat = Vec3::new(to.x, 0.0, to.z);
        if flat.length() > FOV_EPS {
            let bearing = flat.z.atan2(flat.x).to_degrees();
            if ang_sep_deg(bearing, pose.heading_deg) > half + FOV_EPS {
                continue;
            }
        }
        if occluded(level, pose.position, obj.position, dist, idx)? {
            continue;
        }
        hits.push((dist, idx));
    }
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(hits.into_iter().map(|(_, idx)| idx).collect())
}

/// True when something else stands between `from` and the target centre.
fn occluded(
    level: &Level,
    from: Vec3,
    target: Vec3,
    dist: f64,
    target_idx: usize,
) -> Result<bool, WorldError> {
    if dist <= FOV_EPS {
        return Ok(false);
    }
    let dir = (target - from).normalized();
    let hit = level.raycast_filtered(from, dir, dist, Some(target_idx), false)?;
    Ok(match hit {
        Some(h) => h.distance < dist - 1e-9,
        None => false,
    })
}
