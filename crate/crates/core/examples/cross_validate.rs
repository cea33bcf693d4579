//! Ten-fold stratified cross-validation of the MLP on encoded WBC records.
//!
//! ```text
//! cargo run --release --example cross_validate [epochs]
//! ```

use std::path::Path;

use cpcr::classifier::{cross_validate, MlpSpec, TrainConfig};
use cpcr::data::{discretize, load_csv, make_folds, BinningSchema, LabelColumn};
use cpcr::encoder::{Collision, EncodingConfig, Pairing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    let raw = load_csv(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/wbc.csv"), LabelColumn::Last)?;
    let data = discretize(&raw, &BinningSchema::uniform_from(&raw, 10)?)?;
    let pairing = Pairing::identity(data.n_values());
    let config = EncodingConfig::new(10, pairing.pair_count())?
        .with_cell_px(3)
        .with_collision(Collision::CrossAdjacent);
    let plan = make_folds(&data, 10, true, 7)?;
    let train = TrainConfig { epochs, seed: 7, ..TrainConfig::default() };

    println!("{} cases, {} attributes, {}x{} images, {epochs} epochs", data.len(), raw.n_attributes(), config.side(), config.side());
    let report = cross_validate(&data, &pairing, &config, None, &plan, &MlpSpec::standard(), &train)?;
    for fold in &report.folds {
        println!("fold {:>2}: accuracy {:.4} on {} cases", fold.fold, fold.accuracy, fold.validation_case_ids.len());
    }
    println!("mean accuracy {:.4}", report.mean_accuracy);
    Ok(())
}
