use rand::Rng;
use serde::{Deserialize, Serialize};

use super::schedule::{default_schedule, IntensitySchedule, BACKGROUND};
use crate::{rng, Error, Result};

/// Where grid coordinate `(1, 1)` sits in the image.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    #[default]
    UpperLeft,
    LowerLeft,
}

/// What happens when two pairs of one record target the same cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Collision {
    /// The later pair replaces the earlier one (lossy).
    #[default]
    OverwriteLast,
    /// The collider moves to the first free edge neighbor.
    CrossAdjacent,
    /// The collider moves to the first free of all eight neighbors.
    SpiralAdjacent,
    /// The cell is divided into vertical strips, one per collider.
    StripSplit,
    /// The cell keeps the darkest (earliest) pair (lossy).
    DarkestWins,
}

impl Collision {
    /// Strategies that keep every pair in the image (barring neighbor overflow).
    pub fn preserves_pairs(self) -> bool {
        matches!(
            self,
            Collision::CrossAdjacent | Collision::SpiralAdjacent | Collision::StripSplit
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorMode {
    #[default]
    Grayscale,
    /// `(level, 255, 255)`: only the red channel varies.
    RedLevels,
    /// One random `[0, 200]^3` triple per pair index, drawn from `rgb_seed`.
    RandomRgb,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    #[default]
    Cell,
    /// The pair's cell plus its four edge neighbors.
    Plus,
}

/// Screen direction from a cell to one of its neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Right,
    Down,
    Left,
    Up,
    DownRight,
    DownLeft,
    UpRight,
    UpLeft,
}

impl Direction {
    /// `(dx, dy)` in screen terms, `dy` growing downwards.
    fn screen_delta(self) -> (i64, i64) {
        match self {
            Direction::Right => (1, 0),
            Direction::Down => (0, 1),
            Direction::Left => (-1, 0),
            Direction::Up => (0, -1),
            Direction::DownRight => (1, 1),
            Direction::DownLeft => (-1, 1),
            Direction::UpRight => (1, -1),
            Direction::UpLeft => (-1, -1),
        }
    }

    fn is_edge(self) -> bool {
        matches!(
            self,
            Direction::Right | Direction::Down | Direction::Left | Direction::Up
        )
    }
}

/// Spiral fill order: right, down, left, up, then the four diagonals.
pub const SPIRAL_ORDER: [Direction; 8] = [
    Direction::Right,
    Direction::Down,
    Direction::Left,
    Direction::Up,
    Direction::DownRight,
    Direction::DownLeft,
    Direction::UpRight,
    Direction::UpLeft,
];

/// Default cross fill order: right, left, top, bottom.
pub const CROSS_ORDER: [Direction; 4] = [
    Direction::Right,
    Direction::Left,
    Direction::Up,
    Direction::Down,
];

/// Everything needed to encode a record and to decode its image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingConfig {
    pub grid: u32,
    #[serde(default)]
    pub origin: Origin,
    pub cell_px: u32,
    #[serde(default)]
    pub collision: Collision,
    #[serde(default = "default_cross_order")]
    pub cross_order: [Direction; 4],
    pub schedule: IntensitySchedule,
    #[serde(default)]
    pub color_mode: ColorMode,
    #[serde(default)]
    pub marker: Marker,
    #[serde(default)]
    pub rgb_seed: u64,
}

fn default_cross_order() -> [Direction; 4] {
    CROSS_ORDER
}

impl EncodingConfig {
    /// Grayscale, upper-left origin, one pixel per cell, last pair wins,
    /// default schedule for `pairs` pairs.
    pub fn new(grid: u32, pairs: usize) -> Result<Self> {
        let config = EncodingConfig {
            grid,
            origin: Origin::UpperLeft,
            cell_px: 1,
            collision: Collision::OverwriteLast,
            cross_order: CROSS_ORDER,
            schedule: default_schedule(pairs)?,
            color_mode: ColorMode::Grayscale,
            marker: Marker::Cell,
            rgb_seed: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_cell_px(mut self, cell_px: u32) -> Self {
        self.cell_px = cell_px;
        self
    }

    pub fn with_collision(mut self, collision: Collision) -> Self {
        self.collision = collision;
        self
    }

    pub fn with_schedule(mut self, schedule: IntensitySchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_color_mode(mut self, color_mode: ColorMode) -> Self {
        self.color_mode = color_mode;
        self
    }

    pub fn with_marker(mut self, marker: Marker) -> Self {
        self.marker = marker;
        self
    }

    pub fn with_rgb_seed(mut self, seed: u64) -> Self {
        self.rgb_seed = seed;
        self
    }

    /// Cross fill order starting at `start` and turning clockwise (right,
    /// down, left, up) or counter-clockwise.
    pub fn with_cross_rotation(mut self, start: Direction, clockwise: bool) -> Result<Self> {
        let ring = if clockwise {
            [Direction::Right, Direction::Down, Direction::Left, Direction::Up]
        } else {
            [Direction::Right, Direction::Up, Direction::Left, Direction::Down]
        };
        let at = ring
            .iter()
            .position(|&d| d == start)
            .ok_or_else(|| Error::invalid(format!("{start:?} is not an edge direction")))?;
        for (i, slot) in self.cross_order.iter_mut().enumerate() {
            *slot = ring[(at + i) % 4];
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 {
            return Err(Error::invalid(format!("grid {} is below 2", self.grid)));
        }
        if self.cell_px == 0 {
            return Err(Error::invalid("cell_px must be at least 1"));
        }
        let mut order = self.cross_order.to_vec();
        order.sort_by_key(|d| *d as u8);
        order.dedup();
        if order.len() != 4 || !order.iter().all(|d| d.is_edge()) {
            return Err(Error::invalid(format!(
                "cross order {:?} must list right, down, left and up once each",
                self.cross_order
            )));
        }
        Ok(())
    }

    /// Image side in pixels.
    pub fn side(&self) -> u32 {
        self.grid * self.cell_px
    }

    pub fn pair_count(&self) -> usize {
        self.schedule.len()
    }

    /// Neighbor order tried by the adjacent-cell strategies.
    pub fn fill_order(&self) -> &[Direction] {
        match self.collision {
            Collision::SpiralAdjacent => &SPIRAL_ORDER,
            _ => &self.cross_order,
        }
    }

    /// Grid neighbor of `(x, y)` in screen direction `dir`, if on the grid.
    pub fn neighbor(&self, (x, y): (u32, u32), dir: Direction) -> Option<(u32, u32)> {
        let (dx, sy) = dir.screen_delta();
        let dy = match self.origin {
            Origin::UpperLeft => sy,
            Origin::LowerLeft => -sy,
        };
        let nx = i64::from(x) + dx;
        let ny = i64::from(y) + dy;
        let g = i64::from(self.grid);
        ((1..=g).contains(&nx) && (1..=g).contains(&ny)).then_some((nx as u32, ny as u32))
    }

    /// Inverse of [`neighbor`](Self::neighbor): the cell whose `dir`
    /// neighbor is `cell`.
    pub fn neighbor_source(&self, cell: (u32, u32), dir: Direction) -> Option<(u32, u32)> {
        let opposite = match dir {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::DownRight => Direction::UpLeft,
            Direction::UpLeft => Direction::DownRight,
            Direction::DownLeft => Direction::UpRight,
            Direction::UpRight => Direction::DownLeft,
        };
        self.neighbor(cell, opposite)
    }

    /// Top-left pixel `(column, row)` of the block for grid cell `(x, y)`.
    pub fn cell_origin(&self, (x, y): (u32, u32)) -> (u32, u32) {
        let s = self.cell_px;
        let row = match self.origin {
            Origin::UpperLeft => (y - 1) * s,
            Origin::LowerLeft => (self.grid - y) * s,
        };
        ((x - 1) * s, row)
    }

    /// Grid cell containing pixel `(column, row)` of a single image.
    pub fn cell_at(&self, column: u32, row: u32) -> (u32, u32) {
        let s = self.cell_px;
        let x = column / s + 1;
        let y = match self.origin {
            Origin::UpperLeft => row / s + 1,
            Origin::LowerLeft => self.grid - row / s,
        };
        (x, y)
    }

    /// Number of color channels the images use.
    pub fn channels(&self) -> usize {
        match self.color_mode {
            ColorMode::Grayscale => 1,
            ColorMode::RedLevels | ColorMode::RandomRgb => 3,
        }
    }

    /// Pixel value of each pair, in pair order.
    pub fn palette(&self) -> Vec<Vec<u8>> {
        let levels = self.schedule.levels();
        match self.color_mode {
            ColorMode::Grayscale => levels.iter().map(|&l| vec![l]).collect(),
            ColorMode::RedLevels => levels
                .iter()
                .map(|&l| vec![l, BACKGROUND, BACKGROUND])
                .collect(),
            ColorMode::RandomRgb => {
                let mut rng = rng::stream(self.rgb_seed, 0);
                (0..levels.len())
                    .map(|_| (0..3).map(|_| rng.random_range(0..=200u8)).collect())
                    .collect()
            }
        }
    }
}
