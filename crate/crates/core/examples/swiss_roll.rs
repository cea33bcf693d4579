//! Generate a two-class Swiss roll, write it as CSV, and cross-validate the
//! encoded images.
//!
//! ```text
//! cargo run --release --example swiss_roll [dim]
//! ```

use cpcr::classifier::{cross_validate, MlpSpec, TrainConfig};
use cpcr::data::{discretize, gen_swiss_roll, make_folds, BinningSchema};
use cpcr::encoder::{EncodingConfig, Pairing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dim = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let raw = gen_swiss_roll(dim, 300, 0.5, 3)?;
    let csv = std::env::temp_dir().join(format!("swiss_roll_{dim}d.csv"));
    raw.write_csv(&csv)?;
    println!("wrote {} rows of {dim}-D points to {}", raw.len(), csv.display());

    let data = discretize(&raw, &BinningSchema::uniform_from(&raw, 10)?)?;
    let pairing = Pairing::identity(data.n_values());
    let config = EncodingConfig::new(10, pairing.pair_count())?.with_cell_px(2);
    let plan = make_folds(&data, 5, true, 3)?;
    let train = TrainConfig { epochs: 40, batch_size: 16, learning_rate: 0.001, seed: 3, ..TrainConfig::default() };
    let report = cross_validate(&data, &pairing, &config, None, &plan, &MlpSpec::plain(&[64]), &train)?;
    println!("5-fold accuracy {:.4} (folds {:?})", report.mean_accuracy, report.accuracies());
    Ok(())
}
