use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mlp::{image_input, MlpModel};
use crate::encoder::{write_png, CpcrImage};
use crate::{Error, Result};

/// Gradient of one pre-softmax class score with respect to the model input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaliencyMap {
    pub width: u32,
    pub height: u32,
    pub channels: usize,
    pub class: usize,
    /// `dS_c / dI`, same layout as the image pixels.
    pub gradient: Vec<f64>,
    /// `|gradient|` scaled so the largest entry is 1 (all zeros stays zero).
    pub normalized: Vec<f64>,
}

impl SaliencyMap {
    /// One grey pixel per image pixel: the largest normalized magnitude over
    /// its channels, dark where salient, white where not.
    pub fn heatmap(&self) -> CpcrImage {
        let pixels = self
            .normalized
            .chunks_exact(self.channels)
            .map(|c| {
                let v = c.iter().cloned().fold(0.0, f64::max);
                (255.0 * (1.0 - v)).round() as u8
            })
            .collect();
        CpcrImage::from_raw(self.width, self.height, 1, pixels)
            .expect("map layout matches the source image")
    }

    pub fn write_png(&self, path: impl AsRef<Path>) -> Result<()> {
        write_png(&self.heatmap(), path)
    }
}

/// Gradient of `S_class` at a model input vector, dropout off.
pub fn input_gradient(model: &MlpModel, x: &[f64], class: usize) -> Result<Vec<f64>> {
    if x.len() != model.input_len() {
        return Err(Error::DimensionMismatch {
            expected: model.input_len(),
            found: x.len(),
        });
    }
    if class >= model.classes() {
        return Err(Error::invalid(format!(
            "class {class} outside the model's {} classes",
            model.classes()
        )));
    }
    let trace = model.trace(x, None);
    let mut d = vec![0.0; model.classes()];
    d[class] = 1.0;
    Ok(model.backward(&trace, &d, None))
}

/// Saliency of `class` for an image, taken with respect to the normalized
/// pixels (`pixel / divisor`) the model actually sees.
pub fn saliency(model: &MlpModel, image: &CpcrImage, class: usize, divisor: f64) -> Result<SaliencyMap> {
    let gradient = input_gradient(model, &image_input(image, divisor), class)?;
    let peak = gradient.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let normalized = gradient
        .iter()
        .map(|g| if peak > 0.0 { g.abs() / peak } else { 0.0 })
        .collect();
    Ok(SaliencyMap {
        width: image.width(),
        height: image.height(),
        channels: image.channels(),
        class,
        gradient,
        normalized,
    })
}
