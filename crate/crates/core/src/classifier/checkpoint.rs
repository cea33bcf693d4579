use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mlp::{Layer, MlpModel, MlpSpec};
use super::train::TrainConfig;
use crate::{Error, Result};

const FORMAT: &str = "cpcr-mlp";

/// First line of a checkpoint file. The parameters follow as little-endian
/// `f32`: for each layer, weights (row-major) then biases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format: String,
    pub version: u32,
    /// `[inputs, hidden.., classes]`.
    pub dims: Vec<usize>,
    pub spec: MlpSpec,
    pub init_seed: u64,
    pub train: Option<TrainConfig>,
}

/// Writes the model; weights are narrowed to `f32`.
pub fn save_model(model: &MlpModel, train: Option<&TrainConfig>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut dims = vec![model.input_len()];
    dims.extend(model.layers.iter().map(|l| l.outputs));
    let header = CheckpointHeader {
        format: FORMAT.into(),
        version: 1,
        dims,
        spec: model.spec.clone(),
        init_seed: model.init_seed,
        train: train.cloned(),
    };
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    for layer in &model.layers {
        for &v in layer.weights.iter().chain(&layer.bias) {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(MlpModel, CheckpointHeader)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut line = Vec::new();
    reader
        .read_until(b'\n', &mut line)
        .map_err(|e| Error::io(path, e))?;
    let header: CheckpointHeader = serde_json::from_slice(&line)?;
    if header.format != FORMAT || header.version != 1 {
        return Err(Error::Unsupported(format!(
            "checkpoint format {} v{}",
            header.format, header.version
        )));
    }
    if header.dims.len() != header.spec.hidden.len() + 2 {
        return Err(Error::invalid("checkpoint dims disagree with its layer spec"));
    }
    let mut raw = Vec::new();
    reader.read_to_end(&mut raw).map_err(|e| Error::io(path, e))?;
    let expected: usize = header.dims.windows(2).map(|w| (w[0] + 1) * w[1]).sum();
    if raw.len() != expected * 4 {
        return Err(Error::DimensionMismatch {
            expected: expected * 4,
            found: raw.len(),
        });
    }
    let mut values = raw
        .chunks_exact(4)
        .map(|b| f64::from(f32::from_le_bytes(b.try_into().unwrap())));
    let layers = header
        .dims
        .windows(2)
        .map(|w| Layer {
            inputs: w[0],
            outputs: w[1],
            weights: values.by_ref().take(w[0] * w[1]).collect(),
            bias: values.by_ref().take(w[1]).collect(),
        })
        .collect();
    let model = MlpModel {
        layers,
        spec: header.spec.clone(),
        init_seed: header.init_seed,
    };
    Ok((model, header))
}
