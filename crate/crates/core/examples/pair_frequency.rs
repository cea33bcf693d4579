//! Pair-frequency tables for the central block of the ionosphere data.
//!
//! ```text
//! cargo run --example pair_frequency [block_id]
//! ```

use std::path::Path;

use cpcr::analysis::{conserves_cases, icc_cells, pair_frequency, pair_frequency_all};
use cpcr::data::{discretize, load_csv, BinningSchema, LabelColumn};
use cpcr::encoder::Pairing;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(13);
    let raw = load_csv(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/ionosphere.csv"), LabelColumn::Last)?;
    let data = discretize(&raw, &BinningSchema::ionosphere(raw.n_attributes())?)?;
    let pairing = Pairing::identity(data.n_values());
    let cells = icc_cells(10, 2)?;
    let cell = cells
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| cpcr::Error::InvalidArgument(format!("no block {id} on a 10-grid")))?;

    print!("{}", pair_frequency(&data, &pairing, cell)?.to_text());
    let all = pair_frequency_all(&data, &pairing, &cells)?;
    println!("totals over all 25 blocks equal the case count for every pair: {}", conserves_cases(&all, pairing.pair_count()));
    Ok(())
}
