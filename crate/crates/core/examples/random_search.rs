//! Random search over pairings on data whose label is the XOR of
//! attributes 1 and 3; good pairings put them together.
//!
//! ```text
//! cargo run --release --example random_search [k]
//! ```

use cpcr::classifier::{MlpSpec, TrainConfig};
use cpcr::data::{DiscreteDataset, DiscretePoint};
use cpcr::encoder::EncodingConfig;
use cpcr::optimize::{random_search, SearchMode, SearchSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let points = (0..400)
        .map(|i| {
            let v: Vec<u32> = (0..4).map(|_| rng.random_range(1..=10)).collect();
            let label = usize::from((v[0] > 5) != (v[2] > 5));
            DiscretePoint::new(v, label, 10).map(|p| p.with_case_id(i))
        })
        .collect::<cpcr::Result<Vec<_>>>()?;
    let data = DiscreteDataset::new("xor", 10, vec!["even".into(), "odd".into()], points)?;

    let spec = SearchSpec {
        k,
        seed: 21,
        mode: SearchMode::Pairing,
        architecture: MlpSpec::plain(&[32]),
        train: TrainConfig { epochs: 60, batch_size: 8, learning_rate: 0.001, seed: 21, ..TrainConfig::default() },
        ..SearchSpec::default()
    };
    let trace = random_search(&data, &spec, &EncodingConfig::new(10, 2)?)?;
    let pairs = |p: &cpcr::encoder::Pairing| (0..p.pair_count()).map(|k| p.attributes(k)).collect::<Vec<_>>();
    for (i, c) in trace.candidates.iter().enumerate() {
        let tag = if i == 0 { " (baseline)" } else { "" };
        println!("{i:>2}: pairs {:?} levels {:?} accuracy {:.3}{tag}", pairs(&c.pairing), c.schedule.levels(), c.accuracy);
    }
    let best = trace.best_candidate();
    println!("best: candidate {} with pairs {:?}", trace.best, pairs(&best.pairing));
    Ok(())
}
