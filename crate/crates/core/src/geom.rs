//! Small vector / angle / box helpers shared across modules.
//!
//! All geometry is f64. The world is y-up; x and z span the horizontal
//! plane. Angles are degrees in [0, 360), measured from +x toward +z.

use std::ops::{Add, Mul, Sub};

use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn length(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).length()
    }

    /// Distance ignoring the vertical component.
    pub fn horizontal_distance(self, other: Vec3) -> f64 {
        let dx = self.x - other.x;
        let dz = self.z - other.z;
        (dx * dx + dz * dz).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let len = self.length();
        if len == 0.0 {
            Vec3::default()
        } else {
            self * (1.0 / len)
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

// Vec3 serializes as a plain [x, y, z] triple; keeps level files and trace
// logs compact.
impl Serialize for Vec3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(3)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.serialize_element(&self.z)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Vec3 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Vec3;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an [x, y, z] array")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Vec3, A::Error> {
                let x = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(0, &self))?;
                let y = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(1, &self))?;
                let z = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(2, &self))?;
                Ok(Vec3::new(x, y, z))
            }
        }
        deserializer.deserialize_tuple(3, V)
    }
}

/// Axis-aligned box described by its center and half extents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub center: Vec3,
    pub half: Vec3,
}

impl Aabb {
    pub fn new(center: Vec3, size: Vec3) -> Self {
        Aabb {
            center,
            half: size * 0.5,
        }
    }

    pub fn min(&self) -> Vec3 {
        self.center - self.half
    }

    pub fn max(&self) -> Vec3 {
        self.center + self.half
    }

    /// Slab test: distance along `dir` (a unit vector) at which the ray
    /// from `origin` first enters the box, if it does within `max_dist`.
    /// An origin inside the box reports distance 0.
    pub fn ray_entry(&self, origin: Vec3, dir: Vec3, max_dist: f64) -> Option<f64> {
        let lo = self.min();
        let hi = self.max();
        let mut t_enter = 0.0f64;
        let mut t_exit = max_dist;
        for (o, d, l, h) in [
            (origin.x, dir.x, lo.x, hi.x),
            (origin.y, dir.y, lo.y, hi.y),
            (origin.z, dir.z, lo.z, hi.z),
        ] {
            if d.abs() < 1e-12 {
                if o < l || o > h {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / d;
            let (t0, t1) = ((l - o) * inv, (h - o) * inv);
            let (t0, t1) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
            if t_enter > t_exit {
                return None;
            }
        }
        Some(t_enter)
    }
}

/// Wraps an angle in degrees into [0, 360).
pub fn normalize_deg(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r == 360.0 {
        0.0
    } else {
        r
    }
}

/// Absolute angular separation of two headings, in [0, 180].
pub fn ang_sep_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aabb_ray_entry_hits_near_face() {
        // Box centered 50 units out with a 10-unit extent: face at 45.
        let aabb = Aabb::new(Vec3::new(50.0, 0.0, 0.0), Vec3::new(10.0, 10.0, 10.0));
        let d = aabb
            .ray_entry(Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), 200.0)
            .unwrap();
        assert!((d - 45.0).abs() < 1e-12);
    }

    #[test]
    fn aabb_ray_entry_misses_when_aimed_away() {
        let aabb = Aabb::new(Vec3::new(50.0, 0.0, 0.0), Vec3::new(10.0, 10.0, 10.0));
        assert!(aabb
            .ray_entry(Vec3::new(0.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0), 200.0)
            .is_none());
    }

    #[test]
    fn aabb_ray_entry_respects_max_dist() {
        let aabb = Aabb::new(Vec3::new(50.0, 0.0, 0.0), Vec3::new(10.0, 10.0, 10.0));
        assert!(aabb
            .ray_entry(Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), 40.0)
            .is_none());
    }

    #[test]
    fn angular_separation_wraps() {
        assert_eq!(ang_sep_deg(350.0, 10.0), 20.0);
        assert_eq!(ang_sep_deg(10.0, 350.0), 20.0);
        assert_eq!(ang_sep_deg(0.0, 180.0), 180.0);
    }

    #[test]
    fn normalize_deg_wraps_negatives() {
        assert_eq!(normalize_deg(-10.0), 350.0);
        assert_eq!(normalize_deg(720.0), 0.0);
    }
}
