//! Train on WBC, verify gradients, and write a saliency heatmap plus a
//! checkpoint that reloads to the same predictions.
//!
//! ```text
//! cargo run --release --example saliency_map [out_dir]
//! ```

use std::path::Path;

use cpcr::classifier::{fit, grad_check, image_input, load_model, save_model, saliency, MlpSpec, TrainConfig};
use cpcr::data::{discretize, load_csv, BinningSchema, LabelColumn};
use cpcr::encoder::{encode_all, write_png, EncodingConfig, Pairing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("cpcr-saliency"), Into::into);
    std::fs::create_dir_all(&out)?;

    let raw = load_csv(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/wbc.csv"), LabelColumn::Last)?;
    let data = discretize(&raw, &BinningSchema::uniform_from(&raw, 10)?)?;
    let pairing = Pairing::identity(data.n_values());
    let config = EncodingConfig::new(10, pairing.pair_count())?.with_cell_px(3);
    let images = encode_all(&data, &pairing, &config)?;
    let labels: Vec<usize> = data.points.iter().map(|p| p.label()).collect();
    // Mostly-white inputs: the 0.01 default step can kill every hidden unit.
    let train = TrainConfig { epochs: 15, learning_rate: 0.001, seed: 1, ..TrainConfig::default() };
    let (model, history) = fit(&images, &labels, data.n_classes(), &MlpSpec::standard(), &train, 1)?;
    println!("final training loss {:.4}", history.last().map_or(f64::NAN, |e| e.loss));

    let x = image_input(&images[0], train.input_divisor);
    let check = grad_check(&model, &x, labels[0], 1e-5)?;
    println!("gradient check: max relative error {:.2e} over {} parameters", check.max_relative_error, check.checked);

    let class = model.predict(&x)?;
    let map = saliency(&model, &images[0], class, train.input_divisor)?;
    let (peak, _) = map.normalized.iter().enumerate().fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    println!("case 0 predicted class {class}; strongest pixel at column {}, row {}", peak as u32 % map.width, peak as u32 / map.width);
    map.write_png(out.join("saliency_case0.png"))?;
    write_png(&images[0], out.join("case0.png"))?;

    let ckpt = out.join("model.ckpt");
    save_model(&model, Some(&train), &ckpt)?;
    let (reloaded, header) = load_model(&ckpt)?;
    println!("checkpoint: layer sizes {:?}, reload predicts class {}", header.dims, reloaded.predict(&x)?);
    println!("wrote heatmap and checkpoint to {}", out.display());
    Ok(())
}
