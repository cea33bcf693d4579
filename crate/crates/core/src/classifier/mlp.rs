use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoder::CpcrImage;
use crate::{rng, Error, Result};

/// Hidden layer widths and the dropout rate applied after each of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub hidden: Vec<usize>,
    /// One rate per hidden layer; 0 disables dropout there.
    pub dropout: Vec<f64>,
}

impl MlpSpec {
    /// 64 → 64 → 128 ReLU layers, dropout 0.4 after the last two.
    pub fn standard() -> Self {
        MlpSpec {
            hidden: vec![64, 64, 128],
            dropout: vec![0.0, 0.4, 0.4],
        }
    }

    /// Softmax regression: no hidden layers.
    pub fn linear() -> Self {
        MlpSpec {
            hidden: Vec::new(),
            dropout: Vec::new(),
        }
    }

    /// ReLU layers of the given widths, no dropout.
    pub fn plain(hidden: &[usize]) -> Self {
        MlpSpec {
            hidden: hidden.to_vec(),
            dropout: vec![0.0; hidden.len()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden.len() != self.dropout.len() {
            return Err(Error::invalid(format!(
                "{} hidden layers but {} dropout rates",
                self.hidden.len(),
                self.dropout.len()
            )));
        }
        if self.hidden.contains(&0) {
            return Err(Error::invalid("hidden layers need at least one unit"));
        }
        if let Some(r) = self.dropout.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return Err(Error::invalid(format!("dropout rate {r} outside [0, 1)")));
        }
        Ok(())
    }
}

impl Default for MlpSpec {
    fn default() -> Self {
        MlpSpec::standard()
    }
}

/// A dense layer; `weights` is `outputs × inputs`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    fn glorot(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Layer {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        Layer {
            inputs,
            outputs,
            weights: (0..inputs * outputs)
                .map(|_| rng.random_range(-limit..=limit))
                .collect(),
            bias: vec![0.0; outputs],
        }
    }

    pub fn row(&self, output: usize) -> &[f64] {
        &self.weights[output * self.inputs..(output + 1) * self.inputs]
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.bias
                .iter()
                .enumerate()
                .map(|(o, b)| b + dot(self.row(o), x)),
        );
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Feed-forward classifier: ReLU hidden layers, softmax output.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel {
    pub layers: Vec<Layer>,
    pub spec: MlpSpec,
    pub init_seed: u64,
}

/// Pre-softmax scores and class probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub scores: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// Activations kept for backpropagation.
#[derive(Clone, Debug)]
pub(crate) struct Trace {
    /// `acts[0]` is the input, `acts[i]` the (masked) output of layer `i-1`.
    pub acts: Vec<Vec<f64>>,
    /// Dropout multipliers per hidden layer, if any were drawn.
    pub masks: Vec<Option<Vec<f64>>>,
    pub scores: Vec<f64>,
}

/// Gradient of some scalar with respect to every parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros(model: &MlpModel) -> Self {
        Gradients {
            weights: model.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            bias: model.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// `-log softmax(scores)[label]`, computed stably.
pub fn cross_entropy(scores: &[f64], label: usize) -> f64 {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    lse - scores[label]
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Model input for an image: pixels divided by `divisor`, row-major,
/// channels interleaved.
pub fn image_input(image: &CpcrImage, divisor: f64) -> Vec<f64> {
    image.pixels().iter().map(|&p| f64::from(p) / divisor).collect()
}

impl MlpModel {
    /// Glorot-uniform weights and zero biases drawn from `seed`.
    pub fn new(inputs: usize, classes: usize, spec: &MlpSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        if inputs == 0 {
            return Err(Error::Empty("model input"));
        }
        if classes < 2 {
            return Err(Error::TooFewClasses(classes));
        }
        let mut rng = rng::stream(seed, 0);
        let mut widths = vec![inputs];
        widths.extend(&spec.hidden);
        widths.push(classes);
        let layers = widths
            .windows(2)
            .map(|w| Layer::glorot(w[0], w[1], &mut rng))
            .collect();
        Ok(MlpModel {
            layers,
            spec: spec.clone(),
            init_seed: seed,
        })
    }

    pub fn input_len(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn classes(&self) -> usize {
        self.layers.last().unwrap().outputs
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_len() {
            return Err(Error::DimensionMismatch {
                expected: self.input_len(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn trace(&self, x: &[f64], mut dropout: Option<&mut ChaCha8Rng>) -> Trace {
        let hidden = self.layers.len() - 1;
        let mut acts = Vec::with_capacity(self.layers.len());
        let mut masks = Vec::with_capacity(hidden);
        acts.push(x.to_vec());
        let mut z = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&acts[i], &mut z);
            if i == hidden {
                break;
            }
            let mut a: Vec<f64> = z.iter().map(|&v| v.max(0.0)).collect();
            let rate = self.spec.dropout[i];
            let mask = match dropout.as_deref_mut() {
                Some(rng) if rate > 0.0 => {
                    let keep = 1.0 / (1.0 - rate);
                    let m: Vec<f64> = (0..a.len())
                        .map(|_| if rng.random::<f64>() < rate { 0.0 } else { keep })
                        .collect();
                    for (v, k) in a.iter_mut().zip(&m) {
                        *v *= k;
                    }
                    Some(m)
                }
                _ => None,
            };
            masks.push(mask);
            acts.push(a);
        }
        Trace {
            acts,
            masks,
            scores: z,
        }
    }

    /// Backpropagates `d_scores` through a trace; adds parameter gradients
    /// into `grads` (if given) and returns the gradient at the input.
    pub(crate) fn backward(
        &self,
        trace: &Trace,
        d_scores: &[f64],
        mut grads: Option<&mut Gradients>,
    ) -> Vec<f64> {
        let mut delta = d_scores.to_vec();
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let x = &trace.acts[i];
            if let Some(g) = grads.as_deref_mut() {
                let gw = &mut g.weights[i];
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                    for (w, &xi) in row.iter_mut().zip(x) {
                        *w += d * xi;
                    }
                }
                for (b, &d) in g.bias[i].iter_mut().zip(&delta) {
                    *b += d;
                }
            }
            let mut d_in = vec![0.0; layer.inputs];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                for (di, &w) in d_in.iter_mut().zip(layer.row(o)) {
                    *di += d * w;
                }
            }
            if i > 0 {
                // Through the ReLU and dropout that produced acts[i].
                let mask = trace.masks[i - 1].as_deref();
                for (j, di) in d_in.iter_mut().enumerate() {
                    if x[j] <= 0.0 {
                        *di = 0.0;
                    } else if let Some(m) = mask {
                        *di *= m[j];
                    }
                }
            }
            delta = d_in;
        }
        delta
    }

    /// Inference on a model input vector, dropout off.
    pub fn forward_vector(&self, x: &[f64]) -> Result<Output> {
        self.check_input(x)?;
        let scores = self.trace(x, None).scores;
        Ok(Output {
            probabilities: softmax(&scores),
            scores,
        })
    }

    /// Scores and probabilities for an image. Dropout masks are drawn from
    /// `dropout_seed` only when `training` is set.
    pub fn forward(&self, image: &CpcrImage, training: bool, dropout_seed: u64) -> Result<Output> {
        let x = image_input(image, 255.0);
        self.check_input(&x)?;
        let scores = if training {
            let mut rng = rng::stream(dropout_seed, 0);
            self.trace(&x, Some(&mut rng)).scores
        } else {
            self.trace(&x, None).scores
        };
        Ok(Output {
            probabilities: softmax(&scores),
            scores,
        })
    }

    /// Predicted class; ties go to the lowest index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.forward_vector(x)?.scores))
    }

    /// Fraction of `inputs` classified as `labels`.
    pub fn accuracy(&self, inputs: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
        if inputs.is_empty() {
            return Err(Error::Empty("evaluation set"));
        }
        let mut hits = 0usize;
        for (x, &y) in inputs.iter().zip(labels) {
            hits += usize::from(self.predict(x)? == y);
        }
        Ok(hits as f64 / inputs.len() as f64)
    }

    /// Cross-entropy loss and its parameter gradients for one example,
    /// dropout off.
    pub fn loss_gradients(&self, x: &[f64], label: usize) -> Result<(f64, Gradients)> {
        self.check_input(x)?;
        let trace = self.trace(x, None);
        let mut d = softmax(&trace.scores);
        d[label] -= 1.0;
        let mut grads = Gradients::zeros(self);
        self.backward(&trace, &d, Some(&mut grads));
        Ok((cross_entropy(&trace.scores, label), grads))
    }

    pub fn loss(&self, x: &[f64], label: usize) -> Result<f64> {
        self.check_input(x)?;
        Ok(cross_entropy(&self.trace(x, None).scores, label))
    }

    /// Hidden-unit on/off pattern for an input, dropout off.
    pub fn relu_pattern(&self, x: &[f64]) -> Vec<bool> {
        let trace = self.trace(x, None);
        trace.acts[1..].iter().flatten().map(|&a| a > 0.0).collect()
    }

    /// Mutable access to parameter `index` in the flat order used by
    /// gradient checking: per layer, weights then biases.
    pub fn parameter_mut(&mut self, mut index: usize) -> &mut f64 {
        for layer in &mut self.layers {
            if index < layer.weights.len() {
                return &mut layer.weights[index];
            }
            index -= layer.weights.len();
            if index < layer.bias.len() {
                return &mut layer.bias[index];
            }
            index -= layer.bias.len();
        }
        panic!("parameter index out of range");
    }
}

impl Gradients {
    /// Entry `index` in the flat parameter order of
    /// [`MlpModel::parameter_mut`].
    pub fn flat(&self, mut index: usize) -> f64 {
        for (w, b) in self.weights.iter().zip(&self.bias) {
            if index < w.len() {
                return w[index];
            }
            index -= w.len();
            if index < b.len() {
                return b[index];
            }
            index -= b.len();
        }
        panic!("parameter index out of range");
    }
}
