//! Build class-mean backgrounds and the padded double images on WBC.
//!
//! ```text
//! cargo run --example context_images [out_dir]
//! ```

use std::path::Path;

use cpcr::context::{class_means, contextualize, MeanRender};
use cpcr::data::{discretize, load_csv, BinningSchema, LabelColumn};
use cpcr::encoder::{encode_all, write_png, Collision, EncodingConfig, Pairing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("cpcr-context"), Into::into);
    std::fs::create_dir_all(&out)?;

    let raw = load_csv(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/wbc.csv"), LabelColumn::Last)?;
    let data = discretize(&raw, &BinningSchema::uniform_from(&raw, 10)?)?;
    let pairing = Pairing::identity(data.n_values());
    let config = EncodingConfig::new(10, pairing.pair_count())?
        .with_cell_px(3)
        .with_collision(Collision::CrossAdjacent);
    let images = encode_all(&data, &pairing, &config)?;
    let labels: Vec<usize> = data.points.iter().map(|p| p.label()).collect();
    let means = class_means(&images, &labels, data.n_classes())?;

    for (k, mean) in means.iter().enumerate() {
        println!("class {k} ({}): mean over {} images", data.class_names[k], mean.count());
        write_png(&mean.render(MeanRender::Own), out.join(format!("mean_class{k}.png")))?;
    }
    for mode in [MeanRender::Own, MeanRender::Grey] {
        let double = contextualize(&images[0], &means, mode)?;
        println!("{mode:?}: case image {}x{} becomes {}x{}", images[0].width(), images[0].height(), double.width(), double.height());
        write_png(&double, out.join(format!("case0_{mode:?}.png").to_lowercase()))?;
    }
    println!("wrote means and double images to {}", out.display());
    Ok(())
}
