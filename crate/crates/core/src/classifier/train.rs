use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::mlp::{argmax, cross_entropy, softmax, Gradients, MlpModel};
use crate::encoder::CpcrImage;
use crate::{rng, Error, Result};

/// Mini-batch SGD with momentum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Drives shuffling and dropout masks.
    pub seed: u64,
    /// Pixels are divided by this before entering the model.
    pub input_divisor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 32,
            learning_rate: 0.01,
            momentum: 0.9,
            seed: 0,
            input_divisor: 255.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::invalid(format!("momentum {} outside [0, 1)", self.momentum)));
        }
        if !(self.input_divisor > 0.0) {
            return Err(Error::invalid("input divisor must be positive"));
        }
        Ok(())
    }

    pub fn input(&self, image: &CpcrImage) -> Vec<f64> {
        super::mlp::image_input(image, self.input_divisor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean training loss over the epoch's batches, with dropout active.
    pub loss: f64,
    /// Training accuracy of the predictions made during the epoch.
    pub accuracy: f64,
}

pub type History = Vec<EpochStats>;

/// Trains on images; see [`train_vectors`].
pub fn train(
    model: &mut MlpModel,
    images: &[CpcrImage],
    labels: &[usize],
    config: &TrainConfig,
) -> Result<History> {
    let inputs: Vec<Vec<f64>> = images.iter().map(|i| config.input(i)).collect();
    train_vectors(model, &inputs, labels, config)
}

/// Minimizes cross-entropy over `inputs`. Zero epochs leave the model as is.
pub fn train_vectors(
    model: &mut MlpModel,
    inputs: &[Vec<f64>],
    labels: &[usize],
    config: &TrainConfig,
) -> Result<History> {
    config.validate()?;
    if inputs.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if inputs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: inputs.len(),
            found: labels.len(),
        });
    }
    for x in inputs {
        if x.len() != model.input_len() {
            return Err(Error::DimensionMismatch {
                expected: model.input_len(),
                found: x.len(),
            });
        }
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= model.classes()) {
        return Err(Error::invalid(format!(
            "label {bad} outside the model's {} classes",
            model.classes()
        )));
    }

    let mut order_rng = rng::stream(config.seed, 1);
    let mut dropout_rng = rng::stream(config.seed, 2);
    let mut velocity = Gradients::zeros(model);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut order_rng);
        let mut loss_sum = 0.0;
        let mut hits = 0usize;
        let mut batches = 0usize;
        for (b, batch) in order.chunks(config.batch_size).enumerate() {
            let mut grads = Gradients::zeros(model);
            let mut batch_loss = 0.0;
            for &i in batch {
                let trace = model.trace(&inputs[i], Some(&mut dropout_rng));
                let loss = cross_entropy(&trace.scores, labels[i]);
                batch_loss += loss;
                hits += usize::from(argmax(&trace.scores) == labels[i]);
                let mut d = softmax(&trace.scores);
                d[labels[i]] -= 1.0;
                model.backward(&trace, &d, Some(&mut grads));
            }
            batch_loss /= batch.len() as f64;
            if !batch_loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: b });
            }
            loss_sum += batch_loss;
            batches += 1;
            step(model, &mut velocity, &grads, batch.len(), config);
        }
        history.push(EpochStats {
            epoch,
            loss: loss_sum / batches as f64,
            accuracy: hits as f64 / inputs.len() as f64,
        });
    }
    Ok(history)
}

fn step(model: &mut MlpModel, velocity: &mut Gradients, grads: &Gradients, n: usize, c: &TrainConfig) {
    let scale = c.learning_rate / n as f64;
    for (i, layer) in model.layers.iter_mut().enumerate() {
        let params = layer.weights.iter_mut().chain(layer.bias.iter_mut());
        let vel = velocity.weights[i].iter_mut().chain(velocity.bias[i].iter_mut());
        let g = grads.weights[i].iter().chain(&grads.bias[i]);
        for ((p, v), g) in params.zip(vel).zip(g) {
            *v = c.momentum * *v - scale * g;
            *p += *v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::MlpSpec;

    /// Two classes of constant images: all dark or all light.
    fn constant_classes() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..20 {
            let shade = 0.05 * (i % 4) as f64;
            xs.push(vec![shade; 9]);
            ys.push(0);
            xs.push(vec![1.0 - shade; 9]);
            ys.push(1);
        }
        (xs, ys)
    }

    #[test]
    fn separable_classes_are_learned() {
        let (xs, ys) = constant_classes();
        // A closed-form separator exists: sum of pixels above 4.5.
        assert!(xs.iter().zip(&ys).all(|(x, &y)| (x.iter().sum::<f64>() > 4.5) == (y == 1)));
        let mut m = MlpModel::new(9, 2, &MlpSpec::standard(), 4).unwrap();
        let history = train_vectors(&mut m, &xs, &ys, &TrainConfig::default()).unwrap();
        assert_eq!(history.len(), 50);
        assert_eq!(m.accuracy(&xs, &ys).unwrap(), 1.0);
    }

    #[test]
    fn zero_epochs_leave_the_model_unchanged() {
        let (xs, ys) = constant_classes();
        let mut m = MlpModel::new(9, 2, &MlpSpec::standard(), 4).unwrap();
        let before = m.clone();
        let config = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(train_vectors(&mut m, &xs, &ys, &config).unwrap().is_empty());
        assert_eq!(m, before);
    }

    #[test]
    fn same_seeds_same_weights() {
        let (xs, ys) = constant_classes();
        let config = TrainConfig {
            epochs: 3,
            seed: 9,
            ..TrainConfig::default()
        };
        let run = || {
            let mut m = MlpModel::new(9, 2, &MlpSpec::standard(), 4).unwrap();
            train_vectors(&mut m, &xs, &ys, &config).unwrap();
            m
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn divergence_is_reported() {
        let (xs, ys) = constant_classes();
        let mut m = MlpModel::new(9, 2, &MlpSpec::plain(&[4]), 4).unwrap();
        let config = TrainConfig {
            learning_rate: 1e300,
            momentum: 0.0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train_vectors(&mut m, &xs, &ys, &config),
            Err(Error::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn input_errors() {
        let mut m = MlpModel::new(9, 2, &MlpSpec::linear(), 0).unwrap();
        let c = TrainConfig::default();
        assert!(train_vectors(&mut m, &[], &[], &c).is_err());
        assert!(train_vectors(&mut m, &[vec![0.0; 8]], &[0], &c).is_err());
        assert!(train_vectors(&mut m, &[vec![0.0; 9]], &[2], &c).is_err());
    }
}
