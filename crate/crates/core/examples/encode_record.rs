//! Encode one 10-D record on a 10x10 grid and write it as PNG and PGM.
//!
//! ```text
//! cargo run --example encode_record [out_dir]
//! ```

use cpcr::data::DiscretePoint;
use cpcr::encoder::{encode, write_png, write_pnm, EncodingConfig, Pairing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("cpcr-encode"), Into::into);
    std::fs::create_dir_all(&out)?;

    // Five pairs: (8,10), (10,8), (7,10), (9,7), (1,1).
    let point = DiscretePoint::new(vec![8, 10, 10, 8, 7, 10, 9, 7, 1, 1], 0, 10)?;
    let config = EncodingConfig::new(10, 5)?;
    let image = encode(&point, &Pairing::identity(10), &config)?;

    println!("levels by pair: {:?}", config.schedule.levels());
    for row in 0..image.height() {
        let line: String = (0..image.width())
            .map(|col| match image.pixel(col, row)[0] {
                255 => '.',
                v => char::from(b'0' + v / 51),
            })
            .collect();
        println!("{line}");
    }

    // Ten pixels per cell makes the same record readable at a glance.
    let large = encode(&point, &Pairing::identity(10), &config.clone().with_cell_px(10))?;
    write_png(&image, out.join("record.png"))?;
    write_pnm(&image, out.join("record.pgm"))?;
    write_png(&large, out.join("record_large.png"))?;
    println!("wrote record.png, record.pgm and record_large.png to {}", out.display());
    Ok(())
}
