//! Ray queries against terrain and blocking objects.
//!
//! Terrain intersection marches the heightfield in fixed steps; the hit
//! point is the terrain surface at the first sample that falls below
//! ground, so a ray striking a step or cliff face reports the height of
//! the raised terrain it ran into. Object intersection is an exact slab
//! test against each blocking bounding volume. Non-blocking objects never
//! obstruct rays.

use crate::geom::Vec3;
use crate::wfcgen::tileset::WORLD_SIZE;

use super::{Level, WorldError};

/// Terrain march step in units.
pub const RAY_MARCH_STEP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HitTarget {
    Terrain,
    /// Index into `Level::objects`.
    Object(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    pub point: Vec3,
    pub target: HitTarget,
}

impl Level {
    /// Nearest intersection with the heightfield or a blocking object
    /// within `max_dist`, or None. A hit exactly at `max_dist` counts.
    /// The origin must be inside the world bounds.
    pub fn raycast(
        &self,
        origin: Vec3,
        dir: Vec3,
        max_dist: f64,
    ) -> Result<Option<RayHit>, WorldError> {
        self.raycast_filtered(origin, dir, max_dist, None, false)
    }

    /// Raycast against terrain only (object bounding volumes ignored).
    pub fn raycast_terrain(
        &self,
        origin: Vec3,
        dir: Vec3,
        max_dist: f64,
    ) -> Result<Option<RayHit>, WorldError> {
        self.raycast_filtered(origin, dir, max_dist, None, true)
    }

    /// Full raycast with an optional excluded object (used for occlusion
    /// tests so an object does not occlude itself).
    pub fn raycast_filtered(
        &self,
        origin: Vec3,
        dir: Vec3,
        max_dist: f64,
        exclude: Option<usize>,
        terrain_only: bool,
    ) -> Result<Option<RayHit>, WorldError> {
        if !self.in_bounds(origin.x, origin.z) {
            return Err(WorldError::OutOfBounds {
                x: origin.x,
                z: origin.z,
            });
        }
        let dir = dir.normalized();

        let mut terrain: Option<RayHit> = None;
        let steps = (max_dist / RAY_MARCH_STEP).ceil() as usize;
        for k in 1..=steps {
            let t = (k as f64 * RAY_MARCH_STEP).min(max_dist);
            let p = origin + dir * t;
            if !(0.0..=WORLD_SIZE).contains(&p.x) || !(0.0..=WORLD_SIZE).contains(&p.z) {
                break;
            }
            let h = self.heightfield.height_at(p.x, p.z);
            if h > p.y {
                terrain = Some(RayHit {
                    distance: t,
                    point: Vec3::new(p.x, h, p.z),
                    target: HitTarget::Terrain,
                });
                break;
            }
        }

        let mut best = terrain;
        if !terrain_only {
            for (i, obj) in self.objects.iter().enumerate() {
                if !obj.blocking || Some(i) == exclude {
                    continue;
                }
                if let Some(t) = obj.aabb().ray_entry(origin, dir, max_dist) {
                    let closer = match &best {
                        None => true,
                        Some(hit) => t < hit.distance,
                    };
                    if closer {
                        best = Some(RayHit {
                            distance: t,
                            point: origin + dir * t,
                            target: HitTarget::Object(i),
                        });
                    }
                }
            }
        }
        Ok(best)
    }
}
