use serde::{Deserialize, Serialize};

use super::config::{Collision, EncodingConfig};
use super::pairing::ValuePair;
use crate::{Error, Result};

/// What a grid cell holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellContent {
    Single(usize),
    /// Pair indices in strip order (left to right).
    Strips(Vec<usize>),
}

impl CellContent {
    pub fn pairs(&self) -> &[usize] {
        match self {
            CellContent::Single(p) => std::slice::from_ref(p),
            CellContent::Strips(ps) => ps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// Moved to a free neighbor.
    Displaced,
    /// Replaced `previous` in the nominal cell.
    Overwrote { previous: usize },
    /// Dropped; the nominal cell keeps its darker pair.
    KeptDarkest,
    /// Added as a strip to the nominal cell.
    Strip,
    /// No free neighbor; dropped in favor of the darker pair.
    Overflow,
}

/// One collision handled while placing a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub pair_index: usize,
    pub intended: (u32, u32),
    pub placed: (u32, u32),
    pub resolution: Resolution,
}

/// Grid occupancy after placing all pairs of one record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPlacement {
    grid: u32,
    pair_count: usize,
    cells: Vec<Option<CellContent>>,
    pub log: Vec<CollisionEvent>,
}

impl CellPlacement {
    fn empty(grid: u32, pair_count: usize) -> Self {
        CellPlacement {
            grid,
            pair_count,
            cells: vec![None; (grid * grid) as usize],
            log: Vec::new(),
        }
    }

    fn index(&self, (x, y): (u32, u32)) -> usize {
        ((y - 1) * self.grid + (x - 1)) as usize
    }

    pub fn grid(&self) -> u32 {
        self.grid
    }

    /// Number of pairs in the record that was placed.
    pub fn pair_count(&self) -> usize {
        self.pair_count
    }

    pub fn get(&self, cell: (u32, u32)) -> Option<&CellContent> {
        self.cells[self.index(cell)].as_ref()
    }

    pub fn is_occupied(&self, cell: (u32, u32)) -> bool {
        self.get(cell).is_some()
    }

    /// Occupied cells in row-major grid order.
    pub fn occupied(&self) -> impl Iterator<Item = ((u32, u32), &CellContent)> {
        let g = self.grid;
        self.cells.iter().enumerate().filter_map(move |(i, c)| {
            let i = i as u32;
            c.as_ref().map(|c| ((i % g + 1, i / g + 1), c))
        })
    }

    /// Total pair references over all cells.
    pub fn pair_references(&self) -> usize {
        self.occupied().map(|(_, c)| c.pairs().len()).sum()
    }

    /// Cell holding pair `k`, if it survived placement.
    pub fn cell_of(&self, k: usize) -> Option<(u32, u32)> {
        self.occupied()
            .find(|(_, c)| c.pairs().contains(&k))
            .map(|(cell, _)| cell)
    }

    fn set(&mut self, cell: (u32, u32), content: CellContent) {
        let i = self.index(cell);
        self.cells[i] = Some(content);
    }
}

/// Places the value pairs on the grid in order, resolving collisions with
/// `config.collision`.
pub fn place_pairs(pairs: &[ValuePair], config: &EncodingConfig) -> Result<CellPlacement> {
    config.validate()?;
    let g = config.grid;
    for &(a, b) in pairs {
        for v in [a, b] {
            if v == 0 || v > g {
                return Err(Error::OffGrid { value: v, grid: g });
            }
        }
    }
    let mut placement = CellPlacement::empty(g, pairs.len());

    for (k, &cell) in pairs.iter().enumerate() {
        let Some(existing) = placement.get(cell).cloned() else {
            placement.set(cell, CellContent::Single(k));
            continue;
        };
        let event = |placed, resolution| CollisionEvent {
            pair_index: k,
            intended: cell,
            placed,
            resolution,
        };
        match config.collision {
            Collision::OverwriteLast => {
                let previous = *existing.pairs().last().unwrap();
                placement.set(cell, CellContent::Single(k));
                placement
                    .log
                    .push(event(cell, Resolution::Overwrote { previous }));
            }
            Collision::DarkestWins => {
                placement.log.push(event(cell, Resolution::KeptDarkest));
            }
            Collision::StripSplit => {
                let mut strips = existing.pairs().to_vec();
                strips.push(k);
                placement.set(cell, CellContent::Strips(strips));
                placement.log.push(event(cell, Resolution::Strip));
            }
            Collision::CrossAdjacent | Collision::SpiralAdjacent => {
                let free = config
                    .fill_order()
                    .iter()
                    .filter_map(|&d| config.neighbor(cell, d))
                    .find(|&n| !placement.is_occupied(n));
                match free {
                    Some(n) => {
                        placement.set(n, CellContent::Single(k));
                        placement.log.push(event(n, Resolution::Displaced));
                    }
                    None => {
                        log::warn!(
                            "pair {k} at cell {cell:?}: all neighbors occupied, keeping the darker pair"
                        );
                        placement.log.push(event(cell, Resolution::Overflow));
                    }
                }
            }
        }
    }
    Ok(placement)
}
