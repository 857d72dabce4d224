//! The shipped tile set.
//!
//! Thirty-five tiles over three terrain classes: grassland (g), forest
//! edge (f), and rocky ground (m). Grass borders bridge everything;
//! forest and rock never touch directly, which is the only adjacency
//! constraint, so generation cannot contradict. All tile borders sit at
//! height zero (elevation is interior to each tile), so any socket-valid
//! arrangement is automatically seam-free.
//!
//! Preset A weights favor decorated and elevated tiles, preset B favors
//! empty flat ones. The same file shape ships in assets/tileset.toml for
//! out-of-tree editing; a test pins the two copies together.

use super::tileset::{Decoration, ElevationProfile, Surface, TileDef, TileSet, TILE_SIZE};

struct Spec {
    name: &'static str,
    sockets: [&'static str; 4],
    weight_a: f64,
    weight_b: f64,
    surface: Surface,
    decorations: &'static [(&'static str, f64, f64)],
}

/// Default decoration dimensions and blocking behavior per kind:
/// (x extent, y extent, z extent, blocking).
fn kind_shape(kind: &str) -> (f64, f64, f64, bool) {
    match kind {
        "tree" => (5.0, 11.0, 5.0, true),
        "rock" => (3.0, 2.5, 3.0, true),
        "bush" => (2.0, 1.5, 2.0, false),
        "cairn" => (2.0, 2.5, 2.0, false),
        "boulder" => (7.0, 5.0, 7.0, true),
        "monolith" => (13.0, 16.0, 13.0, true),
        "ruin" => (12.0, 6.0, 12.0, true),
        "pillar" => (2.5, 8.0, 2.5, true),
        "hut" => (11.0, 7.0, 11.0, true),
        "well" => (4.0, 3.0, 4.0, true),
        "statue" => (3.0, 7.0, 3.0, true),
        other => panic!("unknown decoration kind '{other}'"),
    }
}

const FLAT: Surface = Surface::Flat;

#[rustfmt::skip]
const SPECS: [Spec; 35] = [
    // Open ground. Dominant under preset B, sparse under preset A.
    Spec { name: "meadow",         sockets: ["g", "g", "g", "g"], weight_a: 0.18, weight_b: 1.00, surface: FLAT, decorations: &[] },
    Spec { name: "open_field",     sockets: ["g", "g", "g", "g"], weight_a: 0.18, weight_b: 1.00, surface: FLAT, decorations: &[] },
    Spec { name: "dry_flat",       sockets: ["g", "g", "g", "g"], weight_a: 0.15, weight_b: 0.95, surface: FLAT, decorations: &[] },
    Spec { name: "scrub_plain",    sockets: ["g", "f", "g", "f"], weight_a: 0.12, weight_b: 0.70, surface: FLAT, decorations: &[] },
    Spec { name: "heath",          sockets: ["f", "f", "f", "f"], weight_a: 0.10, weight_b: 0.60, surface: FLAT, decorations: &[] },
    Spec { name: "stony_flat",     sockets: ["g", "m", "g", "m"], weight_a: 0.12, weight_b: 0.70, surface: FLAT, decorations: &[] },
    Spec { name: "barrens",        sockets: ["m", "m", "m", "m"], weight_a: 0.10, weight_b: 0.60, surface: FLAT, decorations: &[] },
    // Single landmarks with a small companion so more than one object
    // kind is in view at once.
    Spec { name: "lone_oak",       sockets: ["g", "g", "g", "g"], weight_a: 0.45, weight_b: 0.03, surface: FLAT, decorations: &[("tree", 25.0, 22.0), ("bush", 33.0, 30.0)] },
    Spec { name: "lone_rock",      sockets: ["g", "g", "g", "g"], weight_a: 0.40, weight_b: 0.03, surface: FLAT, decorations: &[("rock", 30.0, 18.0), ("cairn", 22.0, 28.0)] },
    Spec { name: "meadow_bush",    sockets: ["g", "g", "g", "g"], weight_a: 0.35, weight_b: 0.04, surface: FLAT, decorations: &[("bush", 15.0, 32.0)] },
    Spec { name: "wayside_cairn",  sockets: ["g", "g", "f", "g"], weight_a: 0.40, weight_b: 0.03, surface: FLAT, decorations: &[("cairn", 26.0, 28.0), ("rock", 34.0, 20.0)] },
    Spec { name: "monolith",       sockets: ["g", "m", "g", "g"], weight_a: 0.60, weight_b: 0.01, surface: FLAT, decorations: &[("monolith", 25.0, 25.0), ("rock", 10.0, 30.0), ("cairn", 38.0, 16.0)] },
    // Decorated clusters: each mixes several object kinds spread across
    // the tile, so crossing it keeps a few kinds in sight at once.
    Spec { name: "twin_pines",     sockets: ["g", "f", "f", "g"], weight_a: 0.65, weight_b: 0.01, surface: FLAT, decorations: &[("tree", 18.0, 20.0), ("tree", 33.0, 31.0), ("bush", 25.0, 40.0), ("rock", 40.0, 14.0)] },
    Spec { name: "grove",          sockets: ["f", "f", "f", "f"], weight_a: 0.65, weight_b: 0.01, surface: FLAT, decorations: &[("tree", 13.0, 13.0), ("tree", 36.0, 15.0), ("tree", 24.0, 33.0), ("bush", 38.0, 38.0), ("rock", 10.0, 36.0)] },
    Spec { name: "thicket",        sockets: ["f", "f", "g", "f"], weight_a: 0.60, weight_b: 0.01, surface: FLAT, decorations: &[("bush", 12.0, 25.0), ("bush", 25.0, 12.0), ("tree", 24.0, 38.0), ("rock", 36.0, 28.0), ("cairn", 40.0, 12.0)] },
    Spec { name: "boulder_field",  sockets: ["g", "m", "m", "g"], weight_a: 0.70, weight_b: 0.01, surface: FLAT, decorations: &[("boulder", 14.0, 18.0), ("boulder", 32.0, 30.0), ("rock", 24.0, 40.0), ("cairn", 40.0, 10.0)] },
    Spec { name: "ruin_corner",    sockets: ["g", "g", "m", "g"], weight_a: 0.70, weight_b: 0.01, surface: FLAT, decorations: &[("ruin", 20.0, 20.0), ("pillar", 36.0, 14.0), ("pillar", 34.0, 34.0), ("rock", 12.0, 38.0)] },
    Spec { name: "fallen_pillars", sockets: ["g", "g", "g", "m"], weight_a: 0.60, weight_b: 0.01, surface: FLAT, decorations: &[("pillar", 15.0, 25.0), ("pillar", 25.0, 20.0), ("pillar", 35.0, 28.0), ("statue", 28.0, 38.0), ("rock", 10.0, 12.0)] },
    Spec { name: "hut_yard",       sockets: ["g", "g", "g", "g"], weight_a: 0.70, weight_b: 0.01, surface: FLAT, decorations: &[("hut", 22.0, 24.0), ("well", 38.0, 32.0), ("bush", 12.0, 36.0), ("cairn", 36.0, 12.0)] },
    Spec { name: "shrine",         sockets: ["g", "g", "f", "g"], weight_a: 0.60, weight_b: 0.01, surface: FLAT, decorations: &[("statue", 25.0, 21.0), ("pillar", 17.0, 30.0), ("pillar", 33.0, 30.0), ("cairn", 25.0, 40.0), ("bush", 12.0, 14.0)] },
    Spec { name: "camp",           sockets: ["g", "f", "g", "g"], weight_a: 0.65, weight_b: 0.01, surface: FLAT, decorations: &[("hut", 28.0, 26.0), ("rock", 14.0, 20.0), ("cairn", 40.0, 38.0), ("bush", 12.0, 38.0)] },
    Spec { name: "rock_garden",    sockets: ["m", "g", "m", "g"], weight_a: 0.60, weight_b: 0.01, surface: FLAT, decorations: &[("rock", 15.0, 15.0), ("rock", 35.0, 20.0), ("bush", 22.0, 33.0), ("boulder", 40.0, 40.0), ("cairn", 10.0, 42.0)] },
    Spec { name: "old_well",       sockets: ["g", "g", "g", "f"], weight_a: 0.60, weight_b: 0.01, surface: FLAT, decorations: &[("well", 24.0, 26.0), ("bush", 33.0, 18.0), ("cairn", 14.0, 34.0), ("rock", 38.0, 38.0)] },
    Spec { name: "statue_circle",  sockets: ["g", "g", "g", "g"], weight_a: 0.65, weight_b: 0.01, surface: FLAT, decorations: &[("statue", 25.0, 25.0), ("statue", 13.0, 25.0), ("pillar", 37.0, 25.0), ("pillar", 25.0, 13.0), ("cairn", 25.0, 38.0)] },
    // Elevation. Slopes are walkable hills, plateaus are cliff-walled
    // mesas; both meet their borders at height zero. Mesa bases carry
    // only non-blocking markers so the ring path stays open; the two
    // boulders sit on plateau tops as pure landmarks.
    Spec { name: "grassy_hill",    sockets: ["g", "g", "g", "g"], weight_a: 0.45, weight_b: 0.01, surface: Surface::Slope { rise: 10.0 },    decorations: &[("bush", 40.0, 40.0)] },
    Spec { name: "high_hill",      sockets: ["g", "g", "g", "f"], weight_a: 0.45, weight_b: 0.01, surface: Surface::Slope { rise: 12.0 },    decorations: &[("cairn", 25.0, 25.0), ("rock", 8.0, 40.0)] },
    Spec { name: "knoll",          sockets: ["f", "g", "g", "g"], weight_a: 0.40, weight_b: 0.01, surface: Surface::Slope { rise: 8.0 },     decorations: &[("tree", 38.0, 12.0), ("bush", 12.0, 38.0)] },
    Spec { name: "mesa",           sockets: ["g", "m", "m", "g"], weight_a: 0.55, weight_b: 0.01, surface: Surface::Plateau { rise: 18.0 },  decorations: &[("cairn", 25.0, 46.0), ("bush", 4.0, 25.0)] },
    Spec { name: "high_mesa",      sockets: ["m", "m", "g", "m"], weight_a: 0.45, weight_b: 0.01, surface: Surface::Plateau { rise: 20.0 },  decorations: &[("boulder", 25.0, 25.0), ("cairn", 25.0, 4.0)] },
    Spec { name: "stone_rise",     sockets: ["m", "g", "m", "g"], weight_a: 0.45, weight_b: 0.01, surface: Surface::Plateau { rise: 16.0 },  decorations: &[("cairn", 4.0, 25.0)] },
    Spec { name: "terraced_hill",  sockets: ["g", "g", "g", "g"], weight_a: 0.45, weight_b: 0.01, surface: Surface::Slope { rise: 11.0 },    decorations: &[("cairn", 12.0, 12.0), ("bush", 38.0, 38.0)] },
    Spec { name: "craggy_mesa",    sockets: ["m", "m", "m", "g"], weight_a: 0.50, weight_b: 0.01, surface: Surface::Plateau { rise: 18.0 },  decorations: &[("boulder", 25.0, 27.0), ("bush", 46.0, 25.0)] },
    // Forest connectors.
    Spec { name: "pine_cluster",   sockets: ["f", "f", "f", "g"], weight_a: 0.55, weight_b: 0.01, surface: FLAT, decorations: &[("tree", 20.0, 15.0), ("tree", 30.0, 25.0), ("tree", 15.0, 35.0), ("bush", 38.0, 40.0)] },
    Spec { name: "forest_edge",    sockets: ["g", "f", "g", "g"], weight_a: 0.50, weight_b: 0.02, surface: FLAT, decorations: &[("tree", 35.0, 15.0), ("bush", 18.0, 28.0), ("rock", 28.0, 40.0)] },
    Spec { name: "crossing",       sockets: ["g", "g", "g", "g"], weight_a: 0.50, weight_b: 0.02, surface: FLAT, decorations: &[("cairn", 25.0, 25.0), ("rock", 10.0, 25.0), ("well", 38.0, 30.0)] },
];

/// Builds the built-in tile set. Identical content ships in
/// assets/tileset.toml.
pub fn default_tileset() -> TileSet {
    let tiles = SPECS
        .iter()
        .enumerate()
        .map(|(id, spec)| {
            let decorations = spec
                .decorations
                .iter()
                .map(|&(kind, x, z)| {
                    let (sx, sy, sz, blocking) = kind_shape(kind);
                    debug_assert!((0.0..=TILE_SIZE).contains(&x));
                    debug_assert!((0.0..=TILE_SIZE).contains(&z));
                    Decoration {
                        kind: kind.to_string(),
                        anchor: [x, z],
                        size: [sx, sy, sz],
                        blocking,
                    }
                })
                .collect();
            TileDef {
                id,
                name: spec.name.to_string(),
                sockets: spec.sockets.map(String::from),
                weight_a: spec.weight_a,
                weight_b: spec.weight_b,
                elevation: ElevationProfile {
                    corners: [0.0; 4],
                    surface: spec.surface,
                },
                decorations,
            }
        })
        .collect();
    let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
    TileSet::new(
        tiles,
        [
            pair("g", "g"),
            pair("g", "f"),
            pair("f", "f"),
            pair("g", "m"),
            pair("m", "m"),
        ],
    )
}
