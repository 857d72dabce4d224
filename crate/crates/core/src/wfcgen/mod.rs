//! Wave function collapse over the 7x7 tile grid.
//!
//! Cells hold domains of (tile, rotation) candidates; only tiles with a
//! positive weight under the chosen preset participate. Until the grid is
//! fully collapsed the generator repeatedly picks the uncollapsed cell
//! with minimum Shannon entropy of its weighted domain (ties broken by a
//! seeded uniform choice), samples a candidate proportional to tile
//! weights, and restores arc-consistency over the 4-neighbor constraint
//! graph. A contradiction restarts the whole attempt with seed+1; after
//! 100 restarts generation fails with the cell that last contradicted.

pub mod tileset;

mod default_tiles;

pub use default_tiles::default_tileset;
pub use tileset::{
    Decoration, ElevationProfile, Preset, Rotation, Side, Surface, TileDef, TileSet, TilesetError,
    GRID_DIM, TILE_COUNT, TILE_SIZE, WORLD_SIZE,
};

use thiserror::Error;

use crate::rng::Rng;
use crate::world::PlacedTile;

/// Restart budget before generation gives up on a preset/seed pair.
pub const MAX_RESTARTS: usize = 100;

const CELLS: usize = GRID_DIM * GRID_DIM;

#[derive(Debug, Error)]
pub enum WfcError {
    #[error(transparent)]
    InvalidTileset(#[from] TilesetError),
    #[error(
        "generation contradicted at cell ({},{}) and stayed unsatisfiable after {restarts} restarts",
        .last_contradiction.0,
        .last_contradiction.1
    )]
    Unsatisfiable {
        restarts: usize,
        last_contradiction: (usize, usize),
    },
}

/// A cell's domain emptied during propagation.
#[derive(Debug, Clone, Copy, Error, PartialEq, Eq)]
#[error("contradiction: cell ({},{}) has an empty domain", .cell.0, .cell.1)]
pub struct Contradiction {
    pub cell: (usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Candidate {
    tile: usize,
    rot: Rotation,
}

/// Collapse state of one generation attempt.
///
/// Domains never become empty except transiently inside `propagate`, which
/// reports the contradiction instead of leaving an empty domain behind.
#[derive(Clone, Debug)]
pub struct WaveState {
    pub rng_seed: u64,
    /// Cells that were explicitly collapsed by a sampling step.
    pub collapsed: Vec<bool>,
    cands: Vec<Candidate>,
    weights: Vec<f64>,
    /// Socket label index per candidate per side (N, E, S, W).
    sockets: Vec<[u16; 4]>,
    /// Symmetric label compatibility matrix, row-major n_labels^2.
    compat: Vec<bool>,
    n_labels: usize,
    /// domains[cell * cands.len() + candidate]
    domains: Vec<bool>,
    counts: Vec<usize>,
}

impl WaveState {
    /// Full-domain state over every positive-weight candidate.
    pub fn new(set: &TileSet, preset: Preset, rng_seed: u64) -> WaveState {
        let mut label_idx: std::collections::HashMap<String, u16> =
            std::collections::HashMap::new();
        let mut cands = Vec::new();
        let mut weights = Vec::new();
        let mut sockets = Vec::new();
        for tile in &set.tiles {
            if tile.weight(preset) <= 0.0 {
                continue;
            }
            for rot in Rotation::ALL {
                cands.push(Candidate { tile: tile.id, rot });
                weights.push(tile.weight(preset));
                let mut s = [0u16; 4];
                for side in Side::ALL {
                    let label = tile.socket_at(side, rot);
                    let next = label_idx.len() as u16;
                    let id = *label_idx.entry(label.to_string()).or_insert(next);
                    s[side.index()] = id;
                }
                sockets.push(s);
            }
        }
        let n_labels = label_idx.len();
        let mut compat = vec![false; n_labels * n_labels];
        for (a, ia) in &label_idx {
            for (b, ib) in &label_idx {
                if set.compatible(a, b) {
                    compat[*ia as usize * n_labels + *ib as usize] = true;
                }
            }
        }
        let n = cands.len();
        WaveState {
            rng_seed,
            collapsed: vec![false; CELLS],
            cands,
            weights,
            sockets,
            compat,
            n_labels,
            domains: vec![true; CELLS * n],
            counts: vec![n; CELLS],
        }
    }

    pub fn candidate_count(&self, row: usize, col: usize) -> usize {
        self.counts[row * GRID_DIM + col]
    }

    /// Remaining candidates of a cell as (tile id, rotation) pairs.
    pub fn domain(&self, row: usize, col: usize) -> Vec<(usize, Rotation)> {
        let cell = row * GRID_DIM + col;
        let n = self.cands.len();
        (0..n)
            .filter(|i| self.domains[cell * n + i])
            .map(|i| (self.cands[i].tile, self.cands[i].rot))
            .collect()
    }

    fn entropy(&self, cell: usize) -> f64 {
        let n = self.cands.len();
        let mut total = 0.0;
        for i in 0..n {
            if self.domains[cell * n + i] {
                total += self.weights[i];
            }
        }
        let mut h = 0.0;
        for i in 0..n {
            if self.domains[cell * n + i] {
                let p = self.weights[i] / total;
                if p > 0.0 {
                    h -= p * p.ln();
                }
            }
        }
        h
    }

    /// Restricts a cell to a single candidate (a collapse).
    fn assign(&mut self, cell: usize, cand: usize) {
        let n = self.cands.len();
        for i in 0..n {
            self.domains[cell * n + i] = i == cand;
        }
        self.counts[cell] = 1;
        self.collapsed[cell] = true;
    }

    fn compatible_cands(&self, a: usize, side: Side, b: usize) -> bool {
        let la = self.sockets[a][side.index()] as usize;
        let lb = self.sockets[b][side.opposite().index()] as usize;
        self.compat[la * self.n_labels + lb]
    }
}

/// Cell neighbors with the side of the first cell that faces each.
fn neighbors(cell: usize) -> impl Iterator<Item = (Side, usize)> {
    let row = cell / GRID_DIM;
    let col = cell % GRID_DIM;
    let mut out = Vec::with_capacity(4);
    if row > 0 {
        out.push((Side::North, cell - GRID_DIM));
    }
    if col + 1 < GRID_DIM {
        out.push((Side::East, cell + 1));
    }
    if row + 1 < GRID_DIM {
        out.push((Side::South, cell + GRID_DIM));
    }
    if col > 0 {
        out.push((Side::West, cell - 1));
    }
    out.into_iter()
}

/// Restores arc-consistency after the domain of `cell` shrank.
///
/// Waves outward: every neighbor drops candidates that lost all support,
/// and shrunken neighbors propagate in turn. Reports the contradicted cell
/// when some domain empties.
pub fn propagate(state: &mut WaveState, cell: (usize, usize)) -> Result<(), Contradiction> {
    let n = state.cands.len();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(cell.0 * GRID_DIM + cell.1);
    while let Some(c) = queue.pop_front() {
        for (side, nb) in neighbors(c) {
            let mut changed = false;
            for j in 0..n {
                if !state.domains[nb * n + j] {
                    continue;
                }
                let supported =
                    (0..n).any(|i| state.domains[c * n + i] && state.compatible_cands(i, side, j));
                if !supported {
                    state.domains[nb * n + j] = false;
                    state.counts[nb] -= 1;
                    changed = true;
                }
            }
            if state.counts[nb] == 0 {
                return Err(Contradiction {
                    cell: (nb / GRID_DIM, nb % GRID_DIM),
                });
            }
            if changed {
                queue.push_back(nb);
            }
        }
    }
    Ok(())
}

/// Generates a 7x7 grid of placed tiles for the preset. Deterministic in
/// (tileset, preset, seed); restart k reseeds the generator with seed + k.
pub fn generate(set: &TileSet, preset: Preset, seed: u64) -> Result<Vec<PlacedTile>, WfcError> {
    set.validate()?;
    let mut last_contradiction = (0, 0);
    for attempt in 0..=MAX_RESTARTS {
        let attempt_seed = seed.wrapping_add(attempt as u64);
        match try_generate(set, preset, attempt_seed) {
            Ok(tiles) => return Ok(tiles),
            Err(c) => last_contradiction = c.cell,
        }
    }
    Err(WfcError::Unsatisfiable {
        restarts: MAX_RESTARTS,
        last_contradiction,
    })
}

fn try_generate(
    set: &TileSet,
    preset: Preset,
    seed: u64,
) -> Result<Vec<PlacedTile>, Contradiction> {
    let mut state = WaveState::new(set, preset, seed);
    let mut rng = Rng::from_seed(seed);

    // Establish arc-consistency of the initial full domains; candidates
    // with unmatchable sockets drop out immediately.
    for cell in 0..CELLS {
        propagate(&mut state, (cell / GRID_DIM, cell % GRID_DIM))?;
    }

    loop {
        // Minimum-entropy uncollapsed cell; exact ties resolve by seeded
        // uniform choice.
        let mut min_h = f64::INFINITY;
        let mut tied: Vec<usize> = Vec::new();
        for cell in 0..CELLS {
            if state.counts[cell] <= 1 {
                continue;
            }
            let h = state.entropy(cell);
            if h < min_h - 1e-12 {
                min_h = h;
                tied.clear();
                tied.push(cell);
            } else if (h - min_h).abs() <= 1e-12 {
                tied.push(cell);
            }
        }
        if tied.is_empty() {
            break;
        }
        let cell = tied[rng.usize_below(tied.len())];

        let n = state.cands.len();
        let in_domain: Vec<usize> = (0..n).filter(|i| state.domains[cell * n + i]).collect();
        let weights: Vec<f64> = in_domain.iter().map(|&i| state.weights[i]).collect();
        let pick = in_domain[rng.weighted_index(&weights)];
        state.assign(cell, pick);
        propagate(&mut state, (cell / GRID_DIM, cell % GRID_DIM))?;
    }

    let n = state.cands.len();
    let mut tiles = Vec::with_capacity(CELLS);
    for cell in 0..CELLS {
        let i = (0..n)
            .find(|i| state.domains[cell * n + i])
            .expect("all cells collapsed");
        let cand = state.cands[i];
        tiles.push(PlacedTile {
            tile_id: cand.tile,
            rotation: cand.rot,
            row: cell / GRID_DIM,
            col: cell % GRID_DIM,
        });
    }
    Ok(tiles)
}

/// Checks that every adjacent pair in a generated grid has compatible
/// sockets. Used by tests and the level validator.
pub fn grid_sockets_valid(set: &TileSet, tiles: &[PlacedTile]) -> bool {
    let mut grid = vec![None; CELLS];
    for t in tiles {
        grid[t.row * GRID_DIM + t.col] = Some(t);
    }
    for row in 0..GRID_DIM {
        for col in 0..GRID_DIM {
            let Some(a) = grid[row * GRID_DIM + col] else {
                return false;
            };
            let ta = &set.tiles[a.tile_id];
            if col + 1 < GRID_DIM {
                let b = grid[row * GRID_DIM + col + 1].expect("full grid");
                let tb = &set.tiles[b.tile_id];
                if !set.compatible(
                    ta.socket_at(Side::East, a.rotation),
                    tb.socket_at(Side::West, b.rotation),
                ) {
                    return false;
                }
            }
            if row + 1 < GRID_DIM {
                let b = grid[(row + 1) * GRID_DIM + col].expect("full grid");
                let tb = &set.tiles[b.tile_id];
                if !set.compatible(
                    ta.socket_at(Side::South, a.rotation),
                    tb.socket_at(Side::North, b.rotation),
                ) {
                    return false;
                }
            }
        }
    }
    true
}
