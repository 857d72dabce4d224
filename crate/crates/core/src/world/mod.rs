//! World assembly: placed tile grids become walkable levels.
//!
//! A level is a 350x350-unit world built from a 7x7 grid of placed tiles.
//! Building validates the grid (socket compatibility and edge-height
//! continuity between neighbors), samples the heightfield, instantiates
//! decoration objects, and derives the navigation grid. Everything here is
//! deterministic: the same grid and tile set always produce an identical
//! level.

mod nav;
mod raycast;

pub use nav::{NavGrid, PathError, NAV_CELL};
pub use raycast::{HitTarget, RayHit, RAY_MARCH_STEP};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Vec3;
use crate::wfcgen::tileset::{
    rotate_local, Rotation, Side, TileSet, GRID_DIM, TILE_SIZE, WORLD_SIZE,
};

/// Heightfield sample spacing in units (one sample per nav cell).
pub const HEIGHT_SAMPLE: f64 = 5.0;
/// Samples per axis (WORLD_SIZE / HEIGHT_SAMPLE).
pub const HEIGHT_DIM: usize = 70;

/// One tile placement in the level grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedTile {
    pub tile_id: usize,
    pub rotation: Rotation,
    pub row: usize,
    pub col: usize,
}

/// An object instantiated in the world from a tile decoration (or supplied
/// directly through a level file override).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldObject {
    /// Unique id. Derived objects use "{kind}.{row}{col}.{index}".
    pub id: String,
    pub kind: String,
    /// Bounding-volume center. y sits at terrain height plus half the
    /// vertical extent.
    pub position: Vec3,
    /// Bounding-volume extents (x, y, z).
    pub size: Vec3,
    /// Whether the object occludes rays and blocks navigation.
    pub blocking: bool,
}

impl WorldObject {
    pub fn aabb(&self) -> crate::geom::Aabb {
        crate::geom::Aabb::new(self.position, self.size)
    }

    /// Product of the three extents; the "size" used by the large-object
    /// metric.
    pub fn volume(&self) -> f64 {
        self.size.x * self.size.y * self.size.z
    }
}

/// Terrain heights sampled on a regular lattice, one sample per 5x5-unit
/// cell (sampled at the cell center). Height queries are piecewise
/// constant per cell, so cliffs between cells are sharp steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Heightfield {
    dim: usize,
    cell: f64,
    heights: Vec<f64>,
}

impl Heightfield {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn get(&self, ix: usize, iz: usize) -> f64 {
        self.heights[iz * self.dim + ix]
    }

    /// Height at a world point; coordinates outside the lattice clamp to
    /// the border cells.
    pub fn height_at(&self, x: f64, z: f64) -> f64 {
        let ix = ((x / self.cell).floor() as isize).clamp(0, self.dim as isize - 1) as usize;
        let iz = ((z / self.cell).floor() as isize).clamp(0, self.dim as isize - 1) as usize;
        self.get(ix, iz)
    }
}

/// A fully built level.
#[derive(Clone, Debug)]
pub struct Level {
    pub id: String,
    /// Tileset reference recorded in the level file ("default" or a path).
    pub tileset_ref: String,
    /// 49 placements, row-major.
    pub tiles: Vec<PlacedTile>,
    pub objects: Vec<WorldObject>,
    pub heightfield: Heightfield,
    pub nav: NavGrid,
    /// True when the object list came from a file override rather than
    /// from tile decorations.
    pub objects_overridden: bool,
}

/// Identifies a mismatched shared edge between two grid positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeMismatch {
    pub a: (usize, usize),
    pub b: (usize, usize),
}

impl std::fmt::Display for EdgeMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        write!(
            f,
            "({},{})|({},{})",
            self.a.0, self.a.1, self.b.0, self.b.1
        )
    }
}

fn join_edges(edges: &[EdgeMismatch]) -> String {
    edges
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("level grid has {found} tiles, expected {}", GRID_DIM * GRID_DIM)]
    WrongTileCount { found: usize },
    #[error("grid position ({row},{col}) is {reason}")]
    GridPosition {
        row: usize,
        col: usize,
        reason: &'static str,
    },
    #[error("tile id {tile_id} at ({row},{col}) is not in the tile set")]
    UnknownTile {
        tile_id: usize,
        row: usize,
        col: usize,
    },
    #[error("incompatible sockets between grid positions: {}", join_edges(.edges))]
    IncompatibleSockets { edges: Vec<EdgeMismatch> },
    #[error("mismatched edge heights between grid positions: {}", join_edges(.edges))]
    EdgeHeightMismatch { edges: Vec<EdgeMismatch> },
    #[error("duplicate object id '{0}'")]
    DuplicateObjectId(String),
    #[error("point ({x}, {z}) is outside the world bounds")]
    OutOfBounds { x: f64, z: f64 },
}

/// Builds a level from tile placements.
///
/// Validation order: grid shape, socket compatibility, then edge-height
/// continuity. Socket mismatches in generated grids indicate generator
/// bugs; edge-height mismatches indicate tileset authoring bugs (labels
/// that permit geometrically incompatible neighbors). Both error with the
/// full list of offending grid positions.
pub fn build_level(
    id: &str,
    tileset_ref: &str,
    tiles: Vec<PlacedTile>,
    set: &TileSet,
    objects_override: Option<Vec<WorldObject>>,
) -> Result<Level, WorldError> {
    let n = GRID_DIM;
    if tiles.len() != n * n {
        return Err(WorldError::WrongTileCount { found: tiles.len() });
    }
    let mut grid: Vec<Option<&PlacedTile>> = vec![None; n * n];
    for t in &tiles {
        if t.row >= n || t.col >= n {
            return Err(WorldError::GridPosition {
                row: t.row,
                col: t.col,
                reason: "out of range",
            });
        }
        if t.tile_id >= set.tiles.len() {
            return Err(WorldError::UnknownTile {
                tile_id: t.tile_id,
                row: t.row,
                col: t.col,
            });
        }
        let slot = &mut grid[t.row * n + t.col];
        if slot.is_some() {
            return Err(WorldError::GridPosition {
                row: t.row,
                col: t.col,
                reason: "occupied twice",
            });
        }
        *slot = Some(t);
    }
    let at = |row: usize, col: usize| grid[row * n + col].expect("grid fully covered");

    let mut bad_sockets = Vec::new();
    let mut bad_heights = Vec::new();
    let eps = 1e-9;
    for row in 0..n {
        for col in 0..n {
            let a = at(row, col);
            let ta = &set.tiles[a.tile_id];
            if col + 1 < n {
                let b = at(row, col + 1);
                let tb = &set.tiles[b.tile_id];
                let mismatch = EdgeMismatch {
                    a: (row, col),
                    b: (row, col + 1),
                };
                if !set.compatible(
                    ta.socket_at(Side::East, a.rotation),
                    tb.socket_at(Side::West, b.rotation),
                ) {
                    bad_sockets.push(mismatch);
                }
                let ea = ta.edge_heights(Side::East, a.rotation);
                let eb = tb.edge_heights(Side::West, b.rotation);
                if (ea.0 - eb.0).abs() > eps || (ea.1 - eb.1).abs() > eps {
                    bad_heights.push(mismatch);
                }
            }
            if row + 1 < n {
                let b = at(row + 1, col);
                let tb = &set.tiles[b.tile_id];
                let mismatch = EdgeMismatch {
                    a: (row, col),
                    b: (row + 1, col),
                };
                if !set.compatible(
                    ta.socket_at(Side::South, a.rotation),
                    tb.socket_at(Side::North, b.rotation),
                ) {
                    bad_sockets.push(mismatch);
                }
                let ea = ta.edge_heights(Side::South, a.rotation);
                let eb = tb.edge_heights(Side::North, b.rotation);
                if (ea.0 - eb.0).abs() > eps || (ea.1 - eb.1).abs() > eps {
                    bad_heights.push(mismatch);
                }
            }
        }
    }
    if !bad_sockets.is_empty() {
        return Err(WorldError::IncompatibleSockets { edges: bad_sockets });
    }
    if !bad_heights.is_empty() {
        return Err(WorldError::EdgeHeightMismatch { edges: bad_heights });
    }

    // Heightfield: sample each 5x5 cell at its center from the owning
    // tile's interior function.
    let dim = HEIGHT_DIM;
    let mut heights = vec![0.0; dim * dim];
    for iz in 0..dim {
        for ix in 0..dim {
            let x = (ix as f64 + 0.5) * HEIGHT_SAMPLE;
            let z = (iz as f64 + 0.5) * HEIGHT_SAMPLE;
            let col = (x / TILE_SIZE) as usize;
            let row = (z / TILE_SIZE) as usize;
            let placed = at(row, col);
            let tile = &set.tiles[placed.tile_id];
            let lx = x - col as f64 * TILE_SIZE;
            let lz = z - row as f64 * TILE_SIZE;
            heights[iz * dim + ix] = tile.height_at_placed(lx, lz, placed.rotation);
        }
    }
    let heightfield = Heightfield {
        dim,
        cell: HEIGHT_SAMPLE,
        heights,
    };

    let (objects, objects_overridden) = match objects_override {
        Some(list) => (list, true),
        None => {
            let mut list = Vec::new();
            for placed in &tiles {
                let tile = &set.tiles[placed.tile_id];
                for (i, dec) in tile.decorations.iter().enumerate() {
                    let (lx, lz) = rotate_local(dec.anchor[0], dec.anchor[1], placed.rotation);
                    let x = placed.col as f64 * TILE_SIZE + lx;
                    let z = placed.row as f64 * TILE_SIZE + lz;
                    let y = heightfield.height_at(x, z) + dec.size[1] / 2.0;
                    list.push(WorldObject {
                        id: format!("{}.{}{}.{}", dec.kind, placed.row, placed.col, i),
                        kind: dec.kind.clone(),
                        position: Vec3::new(x, y, z),
                        size: Vec3::new(dec.size[0], dec.size[1], dec.size[2]),
                        blocking: dec.blocking,
                    });
                }
            }
            // Row-major placement order already, but placements may arrive
            // in any order; sort for a stable object list.
            list.sort_by(|a, b| a.id.cmp(&b.id));
            (list, false)
        }
    };
    {
        let mut seen = std::collections::HashSet::new();
        for o in &objects {
            if !seen.insert(o.id.as_str()) {
                return Err(WorldError::DuplicateObjectId(o.id.clone()));
            }
        }
    }

    let nav = NavGrid::derive(&heightfield, &objects);

    Ok(Level {
        id: id.to_string(),
        tileset_ref: tileset_ref.to_string(),
        tiles,
        objects,
        heightfield,
        nav,
        objects_overridden,
    })
}

impl Level {
    pub fn in_bounds(&self, x: f64, z: f64) -> bool {
        (0.0..=WORLD_SIZE).contains(&x) && (0.0..=WORLD_SIZE).contains(&z)
    }

    /// Whether a point stands on walkable ground.
    pub fn point_walkable(&self, x: f64, z: f64) -> bool {
        self.in_bounds(x, z) && self.nav.point_walkable(x, z)
    }

    /// Ground height at a world point.
    pub fn ground_height(&self, x: f64, z: f64) -> f64 {
        self.heightfield.height_at(x, z)
    }

    /// A* path between two world points; waypoints are walkable nav-cell
    /// centers at terrain height. Unwalkable endpoints snap to the nearest
    /// walkable cell within 2 cells.
    pub fn find_path(&self, from: Vec3, to: Vec3) -> Result<Vec<Vec3>, PathError> {
        for p in [from, to] {
            if !self.in_bounds(p.x, p.z) {
                return Err(PathError::OutOfBounds { x: p.x, z: p.z });
            }
        }
        let start = self
            .nav
            .snap(from.x, from.z)
            .ok_or(PathError::NoPath)?;
        let goal = self.nav.snap(to.x, to.z).ok_or(PathError::NoPath)?;
        let cells = self.nav.astar(start, goal).ok_or(PathError::NoPath)?;
        Ok(cells
            .into_iter()
            .map(|(ix, iz)| {
                let (x, z) = self.nav.center_of(ix, iz);
                Vec3::new(x, self.heightfield.height_at(x, z), z)
            })
            .collect())
    }

    /// Level file serialization.
    pub fn to_doc(&self) -> LevelDoc {
        LevelDoc {
            id: self.id.clone(),
            tileset: self.tileset_ref.clone(),
            tiles: self.tiles.clone(),
            objects_override: if self.objects_overridden {
                Some(self.objects.clone())
            } else {
                None
            },
        }
    }
}

/// On-disk level description: tile placements plus an optional object
/// override. Heightfield, derived objects, and the nav grid are rebuilt
/// from the tile set on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelDoc {
    pub id: String,
    pub tileset: String,
    pub tiles: Vec<PlacedTile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objects_override: Option<Vec<WorldObject>>,
}

#[derive(Debug, Error)]
pub enum LevelIoError {
    #[error("level parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Build(#[from] WorldError),
}

impl LevelDoc {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("level serialization cannot fail")
    }

    pub fn from_toml(text: &str) -> Result<LevelDoc, LevelIoError> {
        toml::from_str(text).map_err(|e| LevelIoError::Parse(e.to_string()))
    }

    pub fn build(&self, set: &TileSet) -> Result<Level, WorldError> {
        build_level(
            &self.id,
            &self.tileset,
            self.tiles.clone(),
            set,
            self.objects_override.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wfcgen::tileset::{Decoration, ElevationProfile, TileDef};
    use crate::wfcgen::{default_tileset, generate, Preset};

    /// Tile set with a single all-"g" flat tile (id 0) plus any extra
    /// tiles the test supplies. build_level never validates tile-count
    /// invariants of the set itself, so tiny sets keep fixtures small.
    fn mono_set(decorations: Vec<Decoration>, extra: Vec<TileDef>) -> TileSet {
        let mut tiles = vec![TileDef {
            id: 0,
            name: "plain".into(),
            sockets: std::array::from_fn(|_| "g".to_string()),
            weight_a: 1.0,
            weight_b: 1.0,
            elevation: ElevationProfile::flat(0.0),
            decorations,
        }];
        tiles.extend(extra);
        TileSet::new(
            tiles,
            [
                ("g".to_string(), "g".to_string()),
                ("q".to_string(), "q".to_string()),
            ],
        )
    }

    fn full_grid(rotation_at: impl Fn(usize, usize) -> Rotation) -> Vec<PlacedTile> {
        let mut tiles = Vec::with_capacity(GRID_DIM * GRID_DIM);
        for row in 0..GRID_DIM {
            for col in 0..GRID_DIM {
                tiles.push(PlacedTile {
                    tile_id: 0,
                    rotation: rotation_at(row, col),
                    row,
                    col,
                });
            }
        }
        tiles
    }

    fn rock_at(anchor: [f64; 2]) -> Decoration {
        Decoration {
            kind: "rock".into(),
            anchor,
            size: [2.0, 2.0, 2.0],
            blocking: true,
        }
    }

    #[test]
    fn rotation_moves_decorations_clockwise() {
        // Anchor (10, 20) inside a 50-unit tile, rotated about the tile
        // center: one quarter turn clockwise sends it to (30, 10), two to
        // (40, 30), three to (20, 40).
        let set = mono_set(vec![rock_at([10.0, 20.0])], Vec::new());
        let rotations = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];
        let level = build_level(
            "rot",
            "default",
            full_grid(|row, col| if row == 0 { rotations[col.min(3)] } else { Rotation::R0 }),
            &set,
            None,
        )
        .unwrap();
        let expect = [(10.0, 20.0), (30.0, 10.0), (40.0, 30.0), (20.0, 40.0)];
        for (col, (lx, lz)) in expect.iter().enumerate() {
            let id = format!("rock.0{col}.0");
            let obj = level.objects.iter().find(|o| o.id == id).expect("object");
            assert!((obj.position.x - (col as f64 * TILE_SIZE + lx)).abs() < 1e-12);
            assert!((obj.position.z - lz).abs() < 1e-12);
            // Flat terrain: center sits half the vertical extent up.
            assert!((obj.position.y - 1.0).abs() < 1e-12);
        }
        assert_eq!(level.objects.len(), GRID_DIM * GRID_DIM);
    }

    #[test]
    fn build_rejects_malformed_grids() {
        let set = mono_set(Vec::new(), Vec::new());

        let mut short = full_grid(|_, _| Rotation::R0);
        short.pop();
        assert!(matches!(
            build_level("t", "default", short, &set, None),
            Err(WorldError::WrongTileCount { found: 48 })
        ));

        let mut doubled = full_grid(|_, _| Rotation::R0);
        doubled[1].row = 0;
        doubled[1].col = 0;
        assert!(matches!(
            build_level("t", "default", doubled, &set, None),
            Err(WorldError::GridPosition { row: 0, col: 0, .. })
        ));

        let mut unknown = full_grid(|_, _| Rotation::R0);
        unknown[5].tile_id = 7;
        assert!(matches!(
            build_level("t", "default", unknown, &set, None),
            Err(WorldError::UnknownTile { tile_id: 7, .. })
        ));
    }

    #[test]
    fn build_lists_every_bad_edge() {
        // Tile 1 uses socket "q" which never matches "g"; tile 2 raises
        // all corners, so its edges are compatible but misaligned.
        let sealed = TileDef {
            id: 1,
            name: "sealed".into(),
            sockets: std::array::from_fn(|_| "q".to_string()),
            weight_a: 1.0,
            weight_b: 1.0,
            elevation: ElevationProfile::flat(0.0),
            decorations: Vec::new(),
        };
        let raised = TileDef {
            id: 2,
            name: "raised".into(),
            sockets: std::array::from_fn(|_| "g".to_string()),
            weight_a: 1.0,
            weight_b: 1.0,
            elevation: ElevationProfile::flat(5.0),
            decorations: Vec::new(),
        };
        let set = mono_set(Vec::new(), vec![sealed, raised]);

        let mut tiles = full_grid(|_, _| Rotation::R0);
        tiles[0].tile_id = 1;
        match build_level("t", "default", tiles, &set, None) {
            Err(WorldError::IncompatibleSockets { edges }) => assert_eq!(
                edges,
                vec![
                    EdgeMismatch { a: (0, 0), b: (0, 1) },
                    EdgeMismatch { a: (0, 0), b: (1, 0) },
                ]
            ),
            other => panic!("expected socket error, got {other:?}"),
        }

        let mut tiles = full_grid(|_, _| Rotation::R0);
        tiles[0].tile_id = 2;
        match build_level("t", "default", tiles, &set, None) {
            Err(WorldError::EdgeHeightMismatch { edges }) => assert_eq!(edges.len(), 2),
            other => panic!("expected edge height error, got {other:?}"),
        }
    }

    #[test]
    fn build_rejects_duplicate_object_ids() {
        let set = mono_set(Vec::new(), Vec::new());
        let dup = WorldObject {
            id: "rock.1".into(),
            kind: "rock".into(),
            position: Vec3::new(10.0, 1.0, 10.0),
            size: Vec3::new(2.0, 2.0, 2.0),
            blocking: false,
        };
        let err = build_level(
            "t",
            "default",
            full_grid(|_, _| Rotation::R0),
            &set,
            Some(vec![dup.clone(), dup]),
        );
        assert!(matches!(err, Err(WorldError::DuplicateObjectId(id)) if id == "rock.1"));
    }

    #[test]
    fn find_path_checks_bounds_then_snaps() {
        let set = mono_set(Vec::new(), Vec::new());
        let level = build_level("t", "default", full_grid(|_, _| Rotation::R0), &set, None).unwrap();
        let inside = Vec3::new(10.0, 0.0, 10.0);
        assert!(matches!(
            level.find_path(Vec3::new(-5.0, 0.0, 10.0), inside),
            Err(PathError::OutOfBounds { .. })
        ));
        let path = level.find_path(inside, Vec3::new(101.0, 0.0, 12.0)).unwrap();
        assert!(path.len() > 1);
        // Waypoints are cell centers on walkable ground.
        for p in &path {
            assert!(level.point_walkable(p.x, p.z));
            assert_eq!((p.x - 2.5) % 5.0, 0.0);
            assert_eq!((p.z - 2.5) % 5.0, 0.0);
        }
    }

    #[test]
    fn level_doc_toml_round_trip() {
        let set = default_tileset();
        let tiles = generate(&set, Preset::A, 5).unwrap();
        let level = build_level("rt", "default", tiles, &set, None).unwrap();
        let doc = level.to_doc();
        let parsed = LevelDoc::from_toml(&doc.to_toml()).unwrap();
        assert_eq!(doc, parsed);
        let rebuilt = parsed.build(&set).unwrap();
        assert_eq!(level.objects, rebuilt.objects);
        assert_eq!(level.heightfield, rebuilt.heightfield);
    }
}
