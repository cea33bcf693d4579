//! Rank 2x2 grid blocks by how much covering them hurts validation
//! accuracy, on data whose label lives entirely in block 13.
//!
//! ```text
//! cargo run --release --example informative_cells
//! ```

use cpcr::analysis::icc_rank;
use cpcr::classifier::{MlpSpec, TrainConfig};
use cpcr::data::{make_folds, DiscreteDataset, DiscretePoint};
use cpcr::encoder::{EncodingConfig, Pairing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BLOCK13: [(u32, u32); 4] = [(5, 5), (5, 6), (6, 5), (6, 6)];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let outside = |rng: &mut ChaCha8Rng| loop {
        let c = (rng.random_range(1..=10), rng.random_range(1..=10));
        if !BLOCK13.contains(&c) {
            return c;
        }
    };
    // Class 1 puts its first pair in block 13; nothing else ever goes there.
    let points = (0..240)
        .map(|i| {
            let label = i % 2;
            let first = if label == 1 { BLOCK13[rng.random_range(0..4)] } else { outside(&mut rng) };
            let (a, b) = (outside(&mut rng), outside(&mut rng));
            DiscretePoint::new(vec![first.0, first.1, a.0, a.1, b.0, b.1], label, 10).map(|p| p.with_case_id(i))
        })
        .collect::<cpcr::Result<Vec<_>>>()?;
    let data = DiscreteDataset::new("block13", 10, vec!["outside".into(), "inside".into()], points)?;

    let config = EncodingConfig::new(10, 3)?;
    let plan = make_folds(&data, 5, true, 4)?;
    let train = TrainConfig { epochs: 30, seed: 4, ..TrainConfig::default() };
    let report = icc_rank(&data, &Pairing::identity(6), &config, None, 2, &plan, &MlpSpec::standard(), &train)?;
    print!("{}", report.to_text());
    println!("most informative block: {}", report.most_informative);
    Ok(())
}
