use serde::{Deserialize, Serialize};

use super::config::{Direction, EncodingConfig, Marker};
use super::placement::{CellContent, CellPlacement};
use super::schedule::BACKGROUND;
use crate::{Error, Result};

/// Provenance carried by an encoded image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageMeta {
    pub config: EncodingConfig,
    pub case_id: usize,
    pub label: Option<usize>,
}

/// An 8-bit raster with 1 or 3 interleaved channels, rows top to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpcrImage {
    width: u32,
    height: u32,
    channels: usize,
    pixels: Vec<u8>,
    pub meta: Option<ImageMeta>,
}

impl CpcrImage {
    /// All-white image.
    pub fn blank(width: u32, height: u32, channels: usize) -> Self {
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        CpcrImage {
            width,
            height,
            channels,
            pixels: vec![BACKGROUND; width as usize * height as usize * channels],
            meta: None,
        }
    }

    pub fn from_raw(width: u32, height: u32, channels: usize, pixels: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::Geometry(format!("{channels} channels")));
        }
        let expected = width as usize * height as usize * channels;
        if pixels.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: pixels.len(),
            });
        }
        Ok(CpcrImage {
            width,
            height,
            channels,
            pixels,
            meta: None,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    fn offset(&self, column: u32, row: u32) -> usize {
        (row as usize * self.width as usize + column as usize) * self.channels
    }

    pub fn pixel(&self, column: u32, row: u32) -> &[u8] {
        let o = self.offset(column, row);
        &self.pixels[o..o + self.channels]
    }

    pub fn set_pixel(&mut self, column: u32, row: u32, value: &[u8]) {
        let o = self.offset(column, row);
        let c = self.channels;
        self.pixels[o..o + c].copy_from_slice(value);
    }

    /// True for pure white in every channel.
    pub fn is_background(&self, column: u32, row: u32) -> bool {
        self.pixel(column, row).iter().all(|&v| v == BACKGROUND)
    }

    /// Fills the `w × h` rectangle at `(column, row)` with `value`.
    pub fn fill_rect(&mut self, column: u32, row: u32, w: u32, h: u32, value: &[u8]) {
        for r in row..row + h {
            for c in column..column + w {
                self.set_pixel(c, r, value);
            }
        }
    }

    /// Same image with 3 channels (grayscale replicated).
    pub fn to_rgb(&self) -> CpcrImage {
        if self.channels == 3 {
            return self.clone();
        }
        CpcrImage {
            width: self.width,
            height: self.height,
            channels: 3,
            pixels: self.pixels.iter().flat_map(|&v| [v, v, v]).collect(),
            meta: self.meta.clone(),
        }
    }

    /// Count of pixels that are not pure white.
    pub fn foreground_pixels(&self) -> usize {
        self.pixels
            .chunks_exact(self.channels)
            .filter(|p| p.iter().any(|&v| v != BACKGROUND))
            .count()
    }
}

/// Widths of `count` vertical strips sharing a `cell_px`-wide cell: as even
/// as possible, wider strips first.
pub fn strip_widths(cell_px: u32, count: usize) -> Vec<u32> {
    let count = count as u32;
    let base = cell_px / count;
    let extra = cell_px % count;
    (0..count).map(|i| base + u32::from(i < extra)).collect()
}

/// Draws a placement.
pub fn render(placement: &CellPlacement, config: &EncodingConfig) -> Result<CpcrImage> {
    config.validate()?;
    if placement.grid() != config.grid {
        return Err(Error::Geometry(format!(
            "placement grid {} vs config grid {}",
            placement.grid(),
            config.grid
        )));
    }
    if placement.pair_count() > config.schedule.len() {
        return Err(Error::LengthMismatch {
            expected: config.schedule.len(),
            found: placement.pair_count(),
        });
    }
    let s = config.cell_px;
    let side = config.side();
    let palette = config.palette();
    let mut image = CpcrImage::blank(side, side, config.channels());

    for (cell, content) in placement.occupied() {
        let (col, row) = config.cell_origin(cell);
        match content {
            CellContent::Single(k) => image.fill_rect(col, row, s, s, &palette[*k]),
            CellContent::Strips(pairs) => {
                let mut x = col;
                for (&k, w) in pairs.iter().zip(strip_widths(s, pairs.len())) {
                    image.fill_rect(x, row, w, s, &palette[k]);
                    x += w;
                }
            }
        }
    }

    if config.marker == Marker::Plus {
        // Arms never cover occupied cells; among arms, the earlier pair wins.
        let mut painted = vec![false; (config.grid * config.grid) as usize];
        let idx = |(x, y): (u32, u32)| ((y - 1) * config.grid + (x - 1)) as usize;
        let mut refs: Vec<(usize, (u32, u32))> = placement
            .occupied()
            .flat_map(|(cell, c)| c.pairs().iter().map(move |&k| (k, cell)))
            .collect();
        refs.sort_unstable();
        for (k, cell) in refs {
            for dir in [Direction::Right, Direction::Down, Direction::Left, Direction::Up] {
                let Some(arm) = config.neighbor(cell, dir) else {
                    continue;
                };
                if placement.is_occupied(arm) || painted[idx(arm)] {
                    continue;
                }
                painted[idx(arm)] = true;
                let (col, row) = config.cell_origin(arm);
                image.fill_rect(col, row, s, s, &palette[k]);
            }
        }
    }
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::config::{Collision, ColorMode, Origin};
    use crate::encoder::placement::place_pairs;

    #[test]
    fn strip_width_examples() {
        assert_eq!(strip_widths(8, 1), vec![8]);
        assert_eq!(strip_widths(8, 2), vec![4, 4]);
        assert_eq!(strip_widths(8, 3), vec![3, 3, 2]);
        assert_eq!(strip_widths(10, 4), vec![3, 3, 2, 2]);
    }

    #[test]
    fn two_colliders_make_two_half_strips() {
        let cfg = EncodingConfig::new(4, 2)
            .unwrap()
            .with_cell_px(8)
            .with_collision(Collision::StripSplit);
        let placement = place_pairs(&[(2, 2), (2, 2)], &cfg).unwrap();
        let img = render(&placement, &cfg).unwrap();
        for row in 8..16 {
            for col in 8..12 {
                assert_eq!(img.pixel(col, row), &[0]);
            }
            for col in 12..16 {
                assert_eq!(img.pixel(col, row), &[127]);
            }
        }
        assert_eq!(img.foreground_pixels(), 64);
    }

    #[test]
    fn red_levels_only_vary_red() {
        let cfg = EncodingConfig::new(5, 2)
            .unwrap()
            .with_color_mode(ColorMode::RedLevels);
        let placement = place_pairs(&[(1, 1), (5, 5)], &cfg).unwrap();
        let img = render(&placement, &cfg).unwrap();
        assert_eq!(img.channels(), 3);
        assert_eq!(img.pixel(0, 0), &[0, 255, 255]);
        assert_eq!(img.pixel(4, 4), &[127, 255, 255]);
        assert!(img.is_background(2, 2));
    }

    #[test]
    fn plus_marker_arms_clip_and_yield() {
        let cfg = EncodingConfig::new(5, 2)
            .unwrap()
            .with_marker(Marker::Plus)
            .with_origin(Origin::LowerLeft);
        // Pair 1 sits where pair 0's right arm would go.
        let placement = place_pairs(&[(1, 1), (2, 1)], &cfg).unwrap();
        let img = render(&placement, &cfg).unwrap();
        let at = |x, y| {
            let (c, r) = cfg.cell_origin((x, y));
            img.pixel(c, r)[0]
        };
        assert_eq!(at(1, 1), 0);
        assert_eq!(at(2, 1), 127);
        assert_eq!(at(1, 2), 0); // pair 0 arm up
        assert_eq!(at(3, 1), 127); // pair 1 arm right
        assert_eq!(at(2, 2), 127); // pair 1 arm up
        assert_eq!(img.foreground_pixels(), 5);
    }
}
