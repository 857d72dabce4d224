//! Tile definitions and tile sets.
//!
//! A tile is a 50x50-unit square with one socket label per edge, an
//! elevation profile, an optional decoration list, and one probability
//! weight per generation preset. Socket labels form a symmetric
//! compatibility relation; two tiles may sit side by side only when the
//! labels on the shared edge are compatible.
//!
//! Rotations are quarter turns clockwise (viewed from above, north up).
//! Rotating a tile cyclically permutes its sockets and corner heights; no
//! per-rotation variants are authored.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Levels are always this many tiles on a side.
pub const GRID_DIM: usize = 7;
/// Tile edge length in world units.
pub const TILE_SIZE: f64 = 50.0;
/// World extent in units (GRID_DIM * TILE_SIZE).
pub const WORLD_SIZE: f64 = 350.0;
/// A full tile set contains exactly this many definitions.
pub const TILE_COUNT: usize = 35;

/// Edge of a tile (or of a grid cell), in placed world orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    North,
    East,
    South,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::East, Side::South, Side::West];

    pub fn index(self) -> usize {
        match self {
            Side::North => 0,
            Side::East => 1,
            Side::South => 2,
            Side::West => 3,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::North => Side::South,
            Side::East => Side::West,
            Side::South => Side::North,
            Side::West => Side::East,
        }
    }
}

/// Quarter-turn rotation applied to a placed tile, clockwise from above.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Rotation {
    #[default]
    R0,
    R90,
    R180,
    R270,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];

    pub fn quarter_turns(self) -> usize {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 1,
            Rotation::R180 => 2,
            Rotation::R270 => 3,
        }
    }

    pub fn degrees(self) -> u16 {
        self.quarter_turns() as u16 * 90
    }

    pub fn from_degrees(deg: u16) -> Option<Rotation> {
        match deg {
            0 => Some(Rotation::R0),
            90 => Some(Rotation::R90),
            180 => Some(Rotation::R180),
            270 => Some(Rotation::R270),
            _ => None,
        }
    }
}

impl Serialize for Rotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u16(self.degrees())
    }
}

impl<'de> Deserialize<'de> for Rotation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let deg = u16::deserialize(d)?;
        Rotation::from_degrees(deg)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid rotation {deg}, expected 0/90/180/270")))
    }
}

/// Interior height function of a tile. The surface always meets the tile
/// border at the corner-interpolated base height, so adjacent tiles with
/// matching edge heights produce a seam-free heightfield.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "surface", rename_all = "snake_case")]
pub enum Surface {
    /// Bilinear interpolation of the corner heights only.
    Flat,
    /// A walkable hill: a pyramid of the given rise over the base, peaking
    /// at tile center. Gradient is rise/25 per unit, so any rise below
    /// ~12.5 stays under the 45 degree walkability threshold.
    Slope { rise: f64 },
    /// A mesa: flat top of the given rise, with steep walls in the band
    /// 5..10 units from the tile border. The walls exceed 45 degrees for
    /// any rise above 5, so the top reads as scenery, not a walkway.
    Plateau { rise: f64 },
}

impl Surface {
    fn rise(&self) -> f64 {
        match self {
            Surface::Flat => 0.0,
            Surface::Slope { rise } | Surface::Plateau { rise } => *rise,
        }
    }
}

/// Corner order used throughout: NW, NE, SE, SW (clockwise from top-left
/// when viewed from above, north up).
pub const CORNER_NW: usize = 0;
pub const CORNER_NE: usize = 1;
pub const CORNER_SE: usize = 2;
pub const CORNER_SW: usize = 3;

/// Heights at the four tile corners plus the interior surface function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElevationProfile {
    /// Corner heights in NW, NE, SE, SW order (authored orientation).
    pub corners: [f64; 4],
    #[serde(flatten)]
    pub surface: Surface,
}

impl ElevationProfile {
    pub fn flat(height: f64) -> Self {
        ElevationProfile {
            corners: [height; 4],
            surface: Surface::Flat,
        }
    }

    /// Height at authored-local coordinates, u and v in [0, 1] running
    /// west-to-east and north-to-south.
    pub fn height_at(&self, u: f64, v: f64) -> f64 {
        let [nw, ne, se, sw] = self.corners;
        let base = nw * (1.0 - u) * (1.0 - v) + ne * u * (1.0 - v) + se * u * v + sw * (1.0 - u) * v;
        // Normalized distance to the nearest tile border.
        let d = u.min(1.0 - u).min(v).min(1.0 - v);
        let bump = match self.surface {
            Surface::Flat => 0.0,
            Surface::Slope { rise } => rise * 2.0 * d,
            Surface::Plateau { rise } => rise * ((d - 0.1) / 0.1).clamp(0.0, 1.0),
        };
        base + bump
    }
}

/// A decoration anchored inside a tile; instantiated as a world object
/// when the tile is placed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoration {
    /// Object kind, e.g. "tree". Used for novelty bookkeeping.
    pub kind: String,
    /// Tile-local anchor (x, z) in [0, 50], authored orientation.
    pub anchor: [f64; 2],
    /// Bounding volume extents (x, y, z).
    pub size: [f64; 3],
    /// Whether the object occludes rays and blocks navigation.
    pub blocking: bool,
}

/// One tile definition.
#[derive(Clone, Debug, PartialEq)]
pub struct TileDef {
    /// Stable integer id; equals the tile's index in the set.
    pub id: usize,
    pub name: String,
    /// Socket labels in N, E, S, W order (authored orientation).
    pub sockets: [String; 4],
    /// Probability weight under preset A (engaging), in [0, 1].
    pub weight_a: f64,
    /// Probability weight under preset B (unengaging), in [0, 1].
    pub weight_b: f64,
    pub elevation: ElevationProfile,
    pub decorations: Vec<Decoration>,
}

impl TileDef {
    /// Socket on `side` after rotating the tile. Rotation permutes the
    /// four labels cyclically: placed[i] = authored[(i - quarters) mod 4].
    pub fn socket_at(&self, side: Side, rot: Rotation) -> &str {
        &self.sockets[(side.index() + 4 - rot.quarter_turns()) % 4]
    }

    /// Corner height at placed corner index i (NW, NE, SE, SW) after
    /// rotation; same cyclic permutation as sockets.
    pub fn corner_at(&self, corner: usize, rot: Rotation) -> f64 {
        self.elevation.corners[(corner + 4 - rot.quarter_turns()) % 4]
    }

    /// Heights at the two endpoints of the placed edge, in fixed world
    /// traversal order: west-to-east for North/South edges, north-to-south
    /// for East/West edges. Two adjacent tiles match along their shared
    /// edge iff these pairs are equal.
    pub fn edge_heights(&self, side: Side, rot: Rotation) -> (f64, f64) {
        let c = |i| self.corner_at(i, rot);
        match side {
            Side::North => (c(CORNER_NW), c(CORNER_NE)),
            Side::East => (c(CORNER_NE), c(CORNER_SE)),
            Side::South => (c(CORNER_SW), c(CORNER_SE)),
            Side::West => (c(CORNER_NW), c(CORNER_SW)),
        }
    }

    /// Height at placed-local coordinates (x, z) in [0, TILE_SIZE]^2.
    pub fn height_at_placed(&self, lx: f64, lz: f64, rot: Rotation) -> f64 {
        let (ax, az) = unrotate_local(lx, lz, rot);
        self.elevation.height_at(ax / TILE_SIZE, az / TILE_SIZE)
    }

    pub fn weight(&self, preset: Preset) -> f64 {
        match preset {
            Preset::A => self.weight_a,
            Preset::B => self.weight_b,
        }
    }
}

/// Rotates a tile-local point clockwise about the tile center by the given
/// rotation (authored -> placed).
pub fn rotate_local(x: f64, z: f64, rot: Rotation) -> (f64, f64) {
    let c = TILE_SIZE / 2.0;
    let (mut dx, mut dz) = (x - c, z - c);
    for _ in 0..rot.quarter_turns() {
        // Clockwise from above with north up: north (-z) maps to east (+x).
        let (nx, nz) = (-dz, dx);
        dx = nx;
        dz = nz;
    }
    (dx + c, dz + c)
}

/// Inverse of [`rotate_local`] (placed -> authored).
pub fn unrotate_local(x: f64, z: f64, rot: Rotation) -> (f64, f64) {
    let c = TILE_SIZE / 2.0;
    let (mut dx, mut dz) = (x - c, z - c);
    for _ in 0..rot.quarter_turns() {
        let (nx, nz) = (dz, -dx);
        dx = nx;
        dz = nz;
    }
    (dx + c, dz + c)
}

/// Generation weight preset: A is tuned toward engaging layouts, B toward
/// unengaging ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    A,
    B,
}

impl Preset {
    pub fn token(self) -> &'static str {
        match self {
            Preset::A => "a",
            Preset::B => "b",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Preset::A),
            "b" => Ok(Preset::B),
            other => Err(format!("unknown preset '{other}', expected 'a' or 'b'")),
        }
    }
}

#[derive(Debug, Error)]
pub enum TilesetError {
    #[error("tileset has {0} tiles, expected exactly {TILE_COUNT}")]
    WrongTileCount(usize),
    #[error("tile {index} has id {id}, expected ids to equal their index")]
    BadId { index: usize, id: usize },
    #[error("tile '{tile}' weight for preset {preset} is {weight}, outside [0, 1]")]
    BadWeight {
        tile: String,
        preset: &'static str,
        weight: f64,
    },
    #[error("no tile has positive weight under preset {0}")]
    EmptyPreset(&'static str),
    #[error("socket label '{0}' is used by a tile but missing from the compatibility relation")]
    UndeclaredSocket(String),
    #[error("tile '{tile}' decoration {index} is invalid: {reason}")]
    BadDecoration {
        tile: String,
        index: usize,
        reason: String,
    },
    #[error("tile '{0}' has a negative surface rise")]
    NegativeRise(String),
    #[error("preset weight list '{preset}' has {got} entries, expected one per tile ({expected})")]
    PresetLength {
        preset: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("tileset parse error: {0}")]
    Parse(String),
}

/// A full tile set: definitions plus the socket compatibility relation.
#[derive(Clone, Debug)]
pub struct TileSet {
    pub tiles: Vec<TileDef>,
    /// Unordered compatible label pairs (stored with both orderings).
    compat: BTreeSet<(String, String)>,
}

impl TileSet {
    pub fn new(tiles: Vec<TileDef>, pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        let mut compat = BTreeSet::new();
        for (a, b) in pairs {
            compat.insert((b.clone(), a.clone()));
            compat.insert((a, b));
        }
        TileSet { tiles, compat }
    }

    /// Whether two socket labels may face each other across an edge.
    /// Symmetric by construction.
    pub fn compatible(&self, a: &str, b: &str) -> bool {
        self.compat.contains(&(a.to_string(), b.to_string()))
    }

    /// The unordered pairs of the relation, each listed once.
    pub fn compat_pairs(&self) -> Vec<(String, String)> {
        self.compat
            .iter()
            .filter(|(a, b)| a <= b)
            .cloned()
            .collect()
    }

    pub fn validate(&self) -> Result<(), TilesetError> {
        if self.tiles.len() != TILE_COUNT {
            return Err(TilesetError::WrongTileCount(self.tiles.len()));
        }
        let mut any_a = false;
        let mut any_b = false;
        for (index, tile) in self.tiles.iter().enumerate() {
            if tile.id != index {
                return Err(TilesetError::BadId { index, id: tile.id });
            }
            for (preset, w) in [("a", tile.weight_a), ("b", tile.weight_b)] {
                if !(0.0..=1.0).contains(&w) {
                    return Err(TilesetError::BadWeight {
                        tile: tile.name.clone(),
                        preset,
                        weight: w,
                    });
                }
            }
            any_a |= tile.weight_a > 0.0;
            any_b |= tile.weight_b > 0.0;
            if tile.elevation.surface.rise() < 0.0 {
                return Err(TilesetError::NegativeRise(tile.name.clone()));
            }
            for socket in &tile.sockets {
                let declared = self
                    .compat
                    .iter()
                    .any(|(a, b)| a == socket || b == socket);
                if !declared {
                    return Err(TilesetError::UndeclaredSocket(socket.clone()));
                }
            }
            for (i, dec) in tile.decorations.iter().enumerate() {
                let bad = |reason: &str| TilesetError::BadDecoration {
                    tile: tile.name.clone(),
                    index: i,
                    reason: reason.to_string(),
                };
                if dec.kind.is_empty() {
                    return Err(bad("empty kind"));
                }
                if dec.anchor.iter().any(|a| !(0.0..=TILE_SIZE).contains(a)) {
                    return Err(bad("anchor outside the tile"));
                }
                if dec.size.iter().any(|s| *s <= 0.0) {
                    return Err(bad("non-positive size"));
                }
            }
        }
        if !any_a {
            return Err(TilesetError::EmptyPreset("a"));
        }
        if !any_b {
            return Err(TilesetError::EmptyPreset("b"));
        }
        Ok(())
    }

    /// Normalized weight distribution over tiles for a preset.
    pub fn weight_distribution(&self, preset: Preset) -> Vec<f64> {
        let total: f64 = self.tiles.iter().map(|t| t.weight(preset)).sum();
        self.tiles
            .iter()
            .map(|t| t.weight(preset) / total)
            .collect()
    }

    pub fn to_toml(&self) -> String {
        let doc = TilesetDoc::from_set(self);
        toml::to_string(&doc).expect("tileset serialization cannot fail")
    }

    pub fn from_toml(text: &str) -> Result<TileSet, TilesetError> {
        let doc: TilesetDoc =
            toml::from_str(text).map_err(|e| TilesetError::Parse(e.to_string()))?;
        doc.into_set()
    }
}

// ---------- file format ----------

#[derive(Serialize, Deserialize)]
struct TilesetDoc {
    tiles: Vec<TileDoc>,
    compatibility: Vec<[String; 2]>,
    presets: PresetsDoc,
}

#[derive(Serialize, Deserialize)]
struct PresetsDoc {
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TileDoc {
    id: usize,
    name: String,
    sockets: [String; 4],
    corners: [f64; 4],
    #[serde(flatten)]
    surface: Surface,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    decorations: Vec<Decoration>,
}

impl TilesetDoc {
    fn from_set(set: &TileSet) -> Self {
        TilesetDoc {
            tiles: set
                .tiles
                .iter()
                .map(|t| TileDoc {
                    id: t.id,
                    name: t.name.clone(),
                    sockets: t.sockets.clone(),
                    corners: t.elevation.corners,
                    surface: t.elevation.surface,
                    decorations: t.decorations.clone(),
                })
                .collect(),
            compatibility: set
                .compat_pairs()
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
            presets: PresetsDoc {
                a: set.tiles.iter().map(|t| t.weight_a).collect(),
                b: set.tiles.iter().map(|t| t.weight_b).collect(),
            },
        }
    }

    fn into_set(self) -> Result<TileSet, TilesetError> {
        for (name, list) in [("a", &self.presets.a), ("b", &self.presets.b)] {
            if list.len() != self.tiles.len() {
                return Err(TilesetError::PresetLength {
                    preset: if name == "a" { "a" } else { "b" },
                    got: list.len(),
                    expected: self.tiles.len(),
                });
            }
        }
        let tiles = self
            .tiles
            .into_iter()
            .enumerate()
            .map(|(i, t)| TileDef {
                id: t.id,
                name: t.name,
                sockets: t.sockets,
                weight_a: self.presets.a[i],
                weight_b: self.presets.b[i],
                elevation: ElevationProfile {
                    corners: t.corners,
                    surface: t.surface,
                },
                decorations: t.decorations,
            })
            .collect();
        Ok(TileSet::new(
            tiles,
            self.compatibility
                .into_iter()
                .map(|[a, b]| (a, b)),
        ))
    }
}
