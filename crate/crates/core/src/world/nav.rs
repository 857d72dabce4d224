//! Navigation grid and A* pathfinding.
//!
//! One cell per 5x5 units. A cell is walkable iff the local slope stays at
//! or below 45 degrees (height difference to each neighboring cell no
//! larger than the cell size) and no blocking object footprint overlaps
//! it. Paths are 4-connected with unit step cost, so path cost equals BFS
//! distance; the Euclidean heuristic in cell units is admissible.
//!
//! Determinism: neighbor expansion order is fixed (north, east, south,
//! west) and heap ties resolve by cell index, so equal-cost paths always
//! reconstruct identically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use super::{Heightfield, WorldObject};

/// Nav cell edge length in world units.
pub const NAV_CELL: f64 = 5.0;

/// Maximum height difference between neighboring walkable cells (45
/// degrees over one cell).
const MAX_STEP: f64 = NAV_CELL;

/// How far (in cells, Chebyshev) endpoint snapping may move a point.
const SNAP_RADIUS: isize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("point ({x}, {z}) is outside the world bounds")]
    OutOfBounds { x: f64, z: f64 },
    #[error("no path exists between the requested points")]
    NoPath,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NavGrid {
    dim: usize,
    cell: f64,
    walkable: Vec<bool>,
}

impl NavGrid {
    /// Builds a grid directly from a walkability mask (row-major, iz * dim
    /// + ix). Used by tests; levels use [`NavGrid::derive`].
    pub fn from_walkable(dim: usize, cell: f64, walkable: Vec<bool>) -> Self {
        assert_eq!(walkable.len(), dim * dim);
        NavGrid {
            dim,
            cell,
            walkable,
        }
    }

    /// Derives walkability from terrain slope and blocking footprints.
    pub fn derive(hf: &Heightfield, objects: &[WorldObject]) -> Self {
        let dim = hf.dim();
        let cell = hf.cell_size();
        let mut walkable = vec![true; dim * dim];
        for iz in 0..dim {
            for ix in 0..dim {
                let h = hf.get(ix, iz);
                let mut steep = false;
                if ix > 0 {
                    steep |= (h - hf.get(ix - 1, iz)).abs() > MAX_STEP + 1e-9;
                }
                if ix + 1 < dim {
                    steep |= (h - hf.get(ix + 1, iz)).abs() > MAX_STEP + 1e-9;
                }
                if iz > 0 {
                    steep |= (h - hf.get(ix, iz - 1)).abs() > MAX_STEP + 1e-9;
                }
                if iz + 1 < dim {
                    steep |= (h - hf.get(ix, iz + 1)).abs() > MAX_STEP + 1e-9;
                }
                if steep {
                    walkable[iz * dim + ix] = false;
                }
            }
        }
        for o in objects.iter().filter(|o| o.blocking) {
            let (lo_x, hi_x) = (o.position.x - o.size.x / 2.0, o.position.x + o.size.x / 2.0);
            let (lo_z, hi_z) = (o.position.z - o.size.z / 2.0, o.position.z + o.size.z / 2.0);
            let i0 = ((lo_x / cell).floor().max(0.0)) as usize;
            let i1 = ((hi_x / cell).floor()).min(dim as f64 - 1.0).max(0.0) as usize;
            let j0 = ((lo_z / cell).floor().max(0.0)) as usize;
            let j1 = ((hi_z / cell).floor()).min(dim as f64 - 1.0).max(0.0) as usize;
            for iz in j0..=j1 {
                for ix in i0..=i1 {
                    // Positive-area overlap only; touching a cell border
                    // does not block the cell.
                    let (cl_x, cl_z) = (ix as f64 * cell, iz as f64 * cell);
                    if lo_x < cl_x + cell && hi_x > cl_x && lo_z < cl_z + cell && hi_z > cl_z {
                        walkable[iz * dim + ix] = false;
                    }
                }
            }
        }
        NavGrid {
            dim,
            cell,
            walkable,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_walkable(&self, ix: usize, iz: usize) -> bool {
        ix < self.dim && iz < self.dim && self.walkable[iz * self.dim + ix]
    }

    /// Cell containing a world point (clamped to the grid).
    pub fn cell_of(&self, x: f64, z: f64) -> (usize, usize) {
        let ix = ((x / self.cell).floor() as isize).clamp(0, self.dim as isize - 1) as usize;
        let iz = ((z / self.cell).floor() as isize).clamp(0, self.dim as isize - 1) as usize;
        (ix, iz)
    }

    pub fn center_of(&self, ix: usize, iz: usize) -> (f64, f64) {
        ((ix as f64 + 0.5) * self.cell, (iz as f64 + 0.5) * self.cell)
    }

    /// Whether the world point stands on a walkable cell.
    pub fn point_walkable(&self, x: f64, z: f64) -> bool {
        let (ix, iz) = self.cell_of(x, z);
        self.is_walkable(ix, iz)
    }

    /// Nearest walkable cell to the point, searching up to 2 cells out;
    /// ties resolve to the lowest cell index.
    pub fn snap(&self, x: f64, z: f64) -> Option<(usize, usize)> {
        let (cx, cz) = self.cell_of(x, z);
        let mut best: Option<((usize, usize), f64)> = None;
        for dz in -SNAP_RADIUS..=SNAP_RADIUS {
            for dx in -SNAP_RADIUS..=SNAP_RADIUS {
                let ix = cx as isize + dx;
                let iz = cz as isize + dz;
                if ix < 0 || iz < 0 || ix >= self.dim as isize || iz >= self.dim as isize {
                    continue;
                }
                let (ix, iz) = (ix as usize, iz as usize);
                if !self.is_walkable(ix, iz) {
                    continue;
                }
                let (px, pz) = self.center_of(ix, iz);
                let d = (px - x).powi(2) + (pz - z).powi(2);
                let better = match best {
                    None => true,
                    Some((b, bd)) => {
                        d < bd - 1e-12
                            || ((d - bd).abs() <= 1e-12 && (iz, ix) < (b.1, b.0))
                    }
                };
                if better {
                    best = Some(((ix, iz), d));
                }
            }
        }
        best.map(|(cell, _)| cell)
    }

    /// A* between two walkable cells. Returns the cell path including both
    /// endpoints, or None when disconnected. Cost is the number of steps;
    /// the result is always a true shortest path.
    pub fn astar(&self, start: (usize, usize), goal: (usize, usize)) -> Option<Vec<(usize, usize)>> {
        if !self.is_walkable(start.0, start.1) || !self.is_walkable(goal.0, goal.1) {
            return None;
        }
        if start == goal {
            return Some(vec![start]);
        }
        let dim = self.dim;
        let idx = |c: (usize, usize)| c.1 * dim + c.0;
        let h = |c: (usize, usize)| {
            let dx = c.0 as f64 - goal.0 as f64;
            let dz = c.1 as f64 - goal.1 as f64;
            (dx * dx + dz * dz).sqrt()
        };

        #[derive(PartialEq)]
        struct Node {
            f: f64,
            g: u32,
            cell: usize,
        }
        impl Eq for Node {}
        impl Ord for Node {
            // Reversed so the BinaryHeap pops the smallest f first; ties
            // break toward larger g (closer to the goal), then lower index.
            fn cmp(&self, o: &Self) -> Ordering {
                o.f.total_cmp(&self.f)
                    .then_with(|| self.g.cmp(&o.g))
                    .then_with(|| o.cell.cmp(&self.cell))
            }
        }
        impl PartialOrd for Node {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }

        let mut g = vec![u32::MAX; dim * dim];
        let mut parent = vec![usize::MAX; dim * dim];
        let mut heap = BinaryHeap::new();
        g[idx(start)] = 0;
        heap.push(Node {
            f: h(start),
            g: 0,
            cell: idx(start),
        });
        while let Some(node) = heap.pop() {
            let cell = node.cell;
            if node.g > g[cell] {
                continue;
            }
            let (ix, iz) = (cell % dim, cell / dim);
            if (ix, iz) == goal {
                let mut path = vec![goal];
                let mut cur = cell;
                while parent[cur] != usize::MAX {
                    cur = parent[cur];
                    path.push((cur % dim, cur / dim));
                }
                path.reverse();
                return Some(path);
            }
            let neighbors = [
                (ix as isize, iz as isize - 1),
                (ix as isize + 1, iz as isize),
                (ix as isize, iz as isize + 1),
                (ix as isize - 1, iz as isize),
            ];
            for (nx, nz) in neighbors {
                if nx < 0 || nz < 0 || nx >= dim as isize || nz >= dim as isize {
                    continue;
                }
                let (nx, nz) = (nx as usize, nz as usize);
                if !self.walkable[nz * dim + nx] {
                    continue;
                }
                let ncell = nz * dim + nx;
                let ng = node.g + 1;
                if ng < g[ncell] {
                    g[ncell] = ng;
                    parent[ncell] = cell;
                    heap.push(Node {
                        f: ng as f64 + h((nx, nz)),
                        g: ng,
                        cell: ncell,
                    });
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_grid(dim: usize) -> NavGrid {
        NavGrid::from_walkable(dim, NAV_CELL, vec![true; dim * dim])
    }

    #[test]
    fn astar_straight_line_cost() {
        let grid = open_grid(10);
        let path = grid.astar((0, 0), (5, 0)).unwrap();
        assert_eq!(path.len(), 6);
        assert_eq!(path[0], (0, 0));
        assert_eq!(path[5], (5, 0));
    }

    #[test]
    fn astar_same_cell_is_a_single_waypoint() {
        let grid = open_grid(10);
        assert_eq!(grid.astar((3, 3), (3, 3)).unwrap(), vec![(3, 3)]);
    }

    #[test]
    fn astar_routes_around_a_wall() {
        let dim = 7;
        let mut walk = vec![true; dim * dim];
        // Vertical wall at ix=3 with a gap at iz=6.
        for iz in 0..6 {
            walk[iz * dim + 3] = false;
        }
        let grid = NavGrid::from_walkable(dim, NAV_CELL, walk);
        let path = grid.astar((0, 0), (6, 0)).unwrap();
        // Down to the gap, across, and back up: 6 + 6 + 6 steps.
        assert_eq!(path.len(), 19);
        assert!(path.iter().all(|&(ix, iz)| grid.is_walkable(ix, iz)));
    }

    #[test]
    fn astar_reports_disconnection() {
        let dim = 5;
        let mut walk = vec![true; dim * dim];
        for iz in 0..dim {
            walk[iz * dim + 2] = false;
        }
        let grid = NavGrid::from_walkable(dim, NAV_CELL, walk);
        assert!(grid.astar((0, 0), (4, 0)).is_none());
    }

    #[test]
    fn astar_is_deterministic() {
        let grid = open_grid(12);
        let a = grid.astar((1, 1), (9, 7)).unwrap();
        let b = grid.astar((1, 1), (9, 7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn snap_finds_nearby_walkable() {
        let dim = 5;
        let mut walk = vec![true; dim * dim];
        walk[0] = false; // cell (0,0)
        let grid = NavGrid::from_walkable(dim, NAV_CELL, walk);
        let snapped = grid.snap(2.5, 2.5).unwrap();
        assert_ne!(snapped, (0, 0));
        assert!(grid.is_walkable(snapped.0, snapped.1));
    }

    #[test]
    fn snap_gives_up_beyond_two_cells() {
        let dim = 7;
        let mut walk = vec![false; dim * dim];
        walk[6 * dim + 6] = true;
        let grid = NavGrid::from_walkable(dim, NAV_CELL, walk);
        assert_eq!(grid.snap(2.5, 2.5), None);
    }
}
