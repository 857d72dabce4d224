//! Generator-wide guarantees: every seeded generation is a complete,
//! socket-valid tiling, and with all adjacency constraints lifted the
//! tile frequencies follow the preset weights (chi-squared check).

use std::collections::HashSet;

use wayfarer_core::wfcgen::{
    default_tileset, generate, grid_sockets_valid, Preset, TileSet, GRID_DIM, TILE_COUNT,
};

#[test]
fn two_hundred_generations_per_preset_are_complete_and_socket_valid() {
    let set = default_tileset();
    for preset in [Preset::A, Preset::B] {
        for seed in 1..=200 {
            let tiles = generate(&set, preset, seed)
                .unwrap_or_else(|e| panic!("{preset:?} seed {seed}: {e}"));
            assert_eq!(tiles.len(), GRID_DIM * GRID_DIM);
            let cells: HashSet<(usize, usize)> =
                tiles.iter().map(|t| (t.row, t.col)).collect();
            assert_eq!(cells.len(), GRID_DIM * GRID_DIM, "duplicate or missing cell");
            assert!(tiles.iter().all(|t| t.tile_id < TILE_COUNT));
            assert!(
                grid_sockets_valid(&set, &tiles),
                "{preset:?} seed {seed}: incompatible neighbor sockets"
            );
        }
    }
}

#[test]
fn generation_is_deterministic_in_the_seed() {
    let set = default_tileset();
    let a = generate(&set, Preset::A, 11).unwrap();
    let b = generate(&set, Preset::A, 11).unwrap();
    assert_eq!(a, b);
    let c = generate(&set, Preset::A, 12).unwrap();
    assert_ne!(a, c);
}

/// The default tiles with every socket replaced by one universal label,
/// so nothing ever constrains anything and each cell is a pure weighted
/// draw.
fn unconstrained_tileset() -> TileSet {
    let mut tiles = default_tileset().tiles;
    for tile in &mut tiles {
        tile.sockets = std::array::from_fn(|_| "u".to_string());
    }
    let set = TileSet::new(tiles, [("u".to_string(), "u".to_string())]);
    set.validate().expect("unconstrained variant stays valid");
    set
}

/// Upper 1% point of the chi-squared distribution with 34 degrees of
/// freedom.
const CHI2_CRIT_DF34_P99: f64 = 56.0610;

fn chi_squared(set: &TileSet, preset: Preset, generations: u64) -> f64 {
    let mut counts = vec![0u64; TILE_COUNT];
    for seed in 0..generations {
        for placed in generate(set, preset, 500_000 + seed).unwrap() {
            counts[placed.tile_id] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let expected = set.weight_distribution(preset);
    let mut stat = 0.0;
    for (tile, &observed) in counts.iter().enumerate() {
        let want = expected[tile] * total as f64;
        assert!(want >= 5.0, "bin {tile} too thin for the test: {want:.1}");
        stat += (observed as f64 - want).powi(2) / want;
    }
    stat
}

#[test]
fn unconstrained_frequencies_match_the_weights() {
    let set = unconstrained_tileset();
    for preset in [Preset::A, Preset::B] {
        let stat = chi_squared(&set, preset, 200);
        assert!(
            stat < CHI2_CRIT_DF34_P99,
            "{preset:?}: chi-squared {stat:.2} exceeds the 1% critical value"
        );
    }
}
