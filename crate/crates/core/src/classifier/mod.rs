//! The built-in multilayer perceptron: training, gradient checking,
//! saliency and cross-validated evaluation on encoded images.

mod checkpoint;
mod cv;
mod gradcheck;
mod mlp;
mod saliency;
mod train;

pub use checkpoint::{load_model, save_model, CheckpointHeader};
pub use cv::{cross_validate, fit, fold_seed, CvReport, FoldResult};
pub(crate) use cv::prepare_fold;
pub use gradcheck::{grad_check, grad_check_sampled, relative_error, GradCheck};
pub use mlp::{
    argmax, cross_entropy, image_input, softmax, Gradients, Layer, MlpModel, MlpSpec, Output,
};
pub use saliency::{input_gradient, saliency, SaliencyMap};
pub use train::{train, train_vectors, EpochStats, History, TrainConfig};
