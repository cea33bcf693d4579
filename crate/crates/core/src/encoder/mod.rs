//! Point-to-image encoding: pair splitting, placement, rendering, decoding
//! and file export.

mod config;
mod decode;
mod export;
mod pairing;
mod placement;
mod render;
mod schedule;

pub use config::{
    Collision, ColorMode, Direction, EncodingConfig, Marker, Origin, CROSS_ORDER, SPIRAL_ORDER,
};
pub use decode::decode;
pub use export::{
    case_stem, export_case, read_image, write_png, write_pnm, ExportedCase, Sidecar,
    CONTEXT_SUFFIX,
};
pub use pairing::{pair_split, Pairing, ValuePair};
pub use placement::{place_pairs, CellContent, CellPlacement, CollisionEvent, Resolution};
pub use render::{render, strip_widths, CpcrImage, ImageMeta};
pub use schedule::{default_schedule, IntensitySchedule, BACKGROUND};

use crate::data::{DiscreteDataset, DiscretePoint};
use crate::{Error, Result};

/// `render(place_pairs(pair_split(point)))`, with provenance attached.
pub fn encode(point: &DiscretePoint, pairing: &Pairing, config: &EncodingConfig) -> Result<CpcrImage> {
    if point.grid() != config.grid {
        return Err(Error::Geometry(format!(
            "point on a {}-grid, config grid {}",
            point.grid(),
            config.grid
        )));
    }
    let pairs = pair_split(point, pairing)?;
    if pairs.len() != config.pair_count() {
        return Err(Error::LengthMismatch {
            expected: config.pair_count(),
            found: pairs.len(),
        });
    }
    let placement = place_pairs(&pairs, config)?;
    let mut image = render(&placement, config)?;
    image.meta = Some(ImageMeta {
        config: config.clone(),
        case_id: point.case_id(),
        label: Some(point.label()),
    });
    Ok(image)
}

/// Encodes every point of a dataset, in dataset order.
pub fn encode_all(
    data: &DiscreteDataset,
    pairing: &Pairing,
    config: &EncodingConfig,
) -> Result<Vec<CpcrImage>> {
    use rayon::prelude::*;
    data.points
        .par_iter()
        .map(|p| encode(p, pairing, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_pair_record_cells_and_levels() {
        let point = DiscretePoint::new(vec![8, 10, 10, 8, 7, 10, 9, 7, 1, 1], 0, 10).unwrap();
        let config = EncodingConfig::new(10, 5).unwrap();
        let image = encode(&point, &Pairing::identity(10), &config).unwrap();
        let expected = [((8, 10), 0), ((10, 8), 51), ((7, 10), 102), ((9, 7), 153), ((1, 1), 204)];
        assert_eq!(image.foreground_pixels(), 5);
        for ((x, y), level) in expected {
            assert_eq!(image.pixel(x - 1, y - 1), &[level]);
        }
    }

    #[test]
    fn schedule_must_match_pair_count() {
        let point = DiscretePoint::new(vec![1, 2, 3, 4], 0, 10).unwrap();
        let config = EncodingConfig::new(10, 3).unwrap();
        assert!(matches!(
            encode(&point, &Pairing::identity(4), &config),
            Err(Error::LengthMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn random_rgb_is_reproducible() {
        let point = DiscretePoint::new(vec![1, 2, 3, 4, 5, 6], 0, 10).unwrap();
        let config = EncodingConfig::new(10, 3)
            .unwrap()
            .with_color_mode(ColorMode::RandomRgb)
            .with_rgb_seed(11);
        let a = encode(&point, &Pairing::identity(6), &config).unwrap();
        let b = encode(&point, &Pairing::identity(6), &config).unwrap();
        assert_eq!(a, b);
        assert!(a.pixel(0, 1).iter().all(|&v| v <= 200));
    }
}
