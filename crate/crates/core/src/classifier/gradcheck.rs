use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::mlp::MlpModel;
use crate::{rng, Result};

/// Outcome of comparing backpropagated and central-difference gradients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradCheck {
    /// Max over checked parameters of
    /// `|ga - gn| / max(|ga|, |gn|, 1e-8)`.
    pub max_relative_error: f64,
    pub checked: usize,
    /// Parameters skipped because `±epsilon` switched a ReLU, where the
    /// loss has a kink and central differences are meaningless.
    pub skipped_kinks: usize,
}

/// Relative error with the `1e-8` floor.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Checks up to `samples` parameters (all of them if fewer), drawn
/// deterministically from `seed`. Dropout is off.
pub fn grad_check_sampled(
    model: &MlpModel,
    x: &[f64],
    label: usize,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<GradCheck> {
    let (_, grads) = model.loss_gradients(x, label)?;
    let total = model.parameter_count();
    let picked: Vec<usize> = if samples >= total {
        (0..total).collect()
    } else {
        let mut idx = index::sample(&mut rng::stream(seed, 0), total, samples).into_vec();
        idx.sort_unstable();
        idx
    };

    let mut probe = model.clone();
    let mut report = GradCheck {
        max_relative_error: 0.0,
        checked: 0,
        skipped_kinks: 0,
    };
    for p in picked {
        let original = *probe.parameter_mut(p);
        *probe.parameter_mut(p) = original + epsilon;
        let plus = probe.loss(x, label)?;
        let plus_pattern = probe.relu_pattern(x);
        *probe.parameter_mut(p) = original - epsilon;
        let minus = probe.loss(x, label)?;
        let minus_pattern = probe.relu_pattern(x);
        *probe.parameter_mut(p) = original;
        if plus_pattern != minus_pattern {
            report.skipped_kinks += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * epsilon);
        let err = relative_error(grads.flat(p), numeric);
        report.max_relative_error = report.max_relative_error.max(err);
        report.checked += 1;
    }
    Ok(report)
}

/// [`grad_check_sampled`] with 200 parameters drawn from seed 0.
pub fn grad_check(model: &MlpModel, x: &[f64], label: usize, epsilon: f64) -> Result<GradCheck> {
    grad_check_sampled(model, x, label, epsilon, 200, 0)
}
