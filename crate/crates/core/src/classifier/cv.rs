use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mlp::{MlpModel, MlpSpec};
use super::train::{train_vectors, History, TrainConfig};
use crate::context::{class_means, contextualize, MeanRender};
use crate::data::{DiscreteDataset, FoldPlan};
use crate::encoder::{encode_all, CpcrImage, EncodingConfig, Pairing};
use crate::{rng, Error, Result};

/// Outcome of one fold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub accuracy: f64,
    pub train_case_ids: Vec<usize>,
    pub validation_case_ids: Vec<usize>,
    pub final_loss: Option<f64>,
}

/// Cross-validated accuracy of the MLP on encoded images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    pub fold_plan: FoldPlan,
    pub encoding: EncodingConfig,
    pub pairing: Pairing,
    /// Set when the images were composed over fold-local class means.
    pub context: Option<MeanRender>,
    pub architecture: MlpSpec,
    pub train: TrainConfig,
    /// Left out of the JSON so reruns serialize identically.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl CvReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.accuracy).collect()
    }

    /// True when no fold trained on one of its own validation cases.
    pub fn folds_disjoint(&self) -> bool {
        self.folds.iter().all(|f| {
            let held: std::collections::HashSet<_> = f.validation_case_ids.iter().collect();
            f.train_case_ids.iter().all(|id| !held.contains(id))
        })
    }
}

/// Seed for everything random inside fold `fold`.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    rng::stream(seed, fold as u64 + 1).random()
}

/// Training and validation images of one fold, ready for the model.
pub(crate) struct PreparedFold {
    pub train_idx: Vec<usize>,
    pub validation_idx: Vec<usize>,
    pub train_images: Vec<CpcrImage>,
    pub validation_images: Vec<CpcrImage>,
}

/// Splits encoded images by fold; with `context`, composes every image
/// over means built from this fold's training images only.
pub(crate) fn prepare_fold(
    images: &[CpcrImage],
    labels: &[usize],
    n_classes: usize,
    plan: &FoldPlan,
    fold: usize,
    context: Option<MeanRender>,
) -> Result<PreparedFold> {
    let train_idx = plan.train_indices(fold);
    let validation_idx = plan.validation_indices(fold);
    let pick = |idx: &[usize]| idx.iter().map(|&i| images[i].clone()).collect::<Vec<_>>();
    let mut train_images = pick(&train_idx);
    let mut validation_images = pick(&validation_idx);
    if let Some(mode) = context {
        {
            let train_labels: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
            let means = class_means(&train_images, &train_labels, n_classes)?;
            let compose = |imgs: &[CpcrImage]| {
                imgs.iter()
                    .map(|img| contextualize(img, &means, mode))
                    .collect::<Result<Vec<_>>>()
            };
            train_images = compose(&train_images)?;
            validation_images = compose(&validation_images)?;
        }
    }
    Ok(PreparedFold {
        train_idx,
        validation_idx,
        train_images,
        validation_images,
    })
}

/// Builds and trains a fresh model; `seed` drives both init and training.
pub fn fit(
    images: &[CpcrImage],
    labels: &[usize],
    n_classes: usize,
    architecture: &MlpSpec,
    train: &TrainConfig,
    seed: u64,
) -> Result<(MlpModel, History)> {
    let first = images.first().ok_or(Error::Empty("training set"))?;
    let mut model = MlpModel::new(first.pixels().len(), n_classes, architecture, seed)?;
    let inputs: Vec<Vec<f64>> = images.iter().map(|i| train.input(i)).collect();
    let config = TrainConfig {
        seed,
        ..train.clone()
    };
    let history = train_vectors(&mut model, &inputs, labels, &config)?;
    Ok((model, history))
}

/// Encodes, trains and evaluates every fold of `plan` (folds run in
/// parallel, each on its own seed).
pub fn cross_validate(
    data: &DiscreteDataset,
    pairing: &Pairing,
    encoding: &EncodingConfig,
    context: Option<MeanRender>,
    plan: &FoldPlan,
    architecture: &MlpSpec,
    train: &TrainConfig,
) -> Result<CvReport> {
    let started = Instant::now();
    if plan.assignments.len() != data.len() || plan.case_ids != data.case_ids() {
        return Err(Error::invalid("fold plan does not cover this dataset"));
    }
    let images = encode_all(data, pairing, encoding)?;
    let labels = data.labels();
    let n_classes = data.n_classes();

    let folds = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let prepared = prepare_fold(&images, &labels, n_classes, plan, fold, context)?;
            let train_labels: Vec<usize> = prepared.train_idx.iter().map(|&i| labels[i]).collect();
            let val_labels: Vec<usize> =
                prepared.validation_idx.iter().map(|&i| labels[i]).collect();
            let (model, history) = fit(
                &prepared.train_images,
                &train_labels,
                n_classes,
                architecture,
                train,
                fold_seed(train.seed, fold),
            )?;
            let val_inputs: Vec<Vec<f64>> =
                prepared.validation_images.iter().map(|i| train.input(i)).collect();
            let accuracy = model.accuracy(&val_inputs, &val_labels)?;
            log::info!("fold {fold}: validation accuracy {accuracy:.4}");
            Ok(FoldResult {
                fold,
                accuracy,
                train_case_ids: prepared.train_idx.iter().map(|&i| plan.case_ids[i]).collect(),
                validation_case_ids: prepared
                    .validation_idx
                    .iter()
                    .map(|&i| plan.case_ids[i])
                    .collect(),
                final_loss: history.last().map(|h| h.loss),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mean_accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64;
    Ok(CvReport {
        folds,
        mean_accuracy,
        fold_plan: plan.clone(),
        encoding: encoding.clone(),
        pairing: pairing.clone(),
        context,
        architecture: architecture.clone(),
        train: train.clone(),
        wall_clock: started.elapsed(),
    })
}
