//! Compare the five collision strategies on a record whose pairs collide.
//!
//! ```text
//! cargo run --example collisions
//! ```

use cpcr::data::DiscretePoint;
use cpcr::encoder::{decode, encode, place_pairs, pair_split, Collision, EncodingConfig, Pairing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Pairs 0, 2 and 3 share cell (4,4).
    let point = DiscretePoint::new(vec![4, 4, 1, 1, 4, 4, 4, 4, 1, 6], 0, 6)?;
    let pairing = Pairing::identity(10);
    for collision in [
        Collision::OverwriteLast,
        Collision::DarkestWins,
        Collision::CrossAdjacent,
        Collision::SpiralAdjacent,
        Collision::StripSplit,
    ] {
        let config = EncodingConfig::new(6, 5)?.with_cell_px(4).with_collision(collision);
        let placement = place_pairs(&pair_split(&point, &pairing)?, &config)?;
        let image = encode(&point, &pairing, &config)?;
        let recovered = decode(&image, &pairing, &config).map(|p| p.values() == point.values());
        println!("{collision:?}: {} dark pixels, lossless: {:?}", image.foreground_pixels(), recovered.ok());
        for event in &placement.log {
            println!(
                "  pair {} aimed at {:?}, placed at {:?}: {:?}",
                event.pair_index, event.intended, event.placed, event.resolution
            );
        }
    }
    Ok(())
}
