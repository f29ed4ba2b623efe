//! Dense networks for binary classification: data handling, training,
//! evaluation and a synthetic hydraulic-rig dataset.

mod data;
mod metrics;
mod model;
mod pipeline;
mod synth;
mod train;

pub use data::{chronological_split, fit_standardizer, Dataset, Standardizer, TRAIN_FRACTION};
pub use metrics::{evaluate, Averaging, ConfusionMatrix, Metrics};
pub use model::{predict, Activation, Classifier, DenseLayer, MlpArchitecture, MlpModel, Prediction};
pub use pipeline::{run_pipeline, PipelineOutcome};
pub use synth::{
    synth_dataset, synth_hydraulic_dataset, synth_loading, SynthSpec, EPS1_CHANNELS, SE_CHANNELS, SYNTH_FEATURES,
    VS1_CHANNELS,
};
pub use train::{
    loss_and_gradient, mean_loss, train, train_from, EpochRecord, StopReason, TrainConfig, TrainHistory, ADAM_BETA1,
    ADAM_BETA2, ADAM_EPSILON, BCE_EPSILON,
};

#[derive(Debug, thiserror::Error)]
pub enum MlError {
    #[error("invalid architecture: {0}")]
    Architecture(String),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("dataset: {0}")]
    Data(String),
    #[error("expected {expected} features, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("loss became non-finite in epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize },
    #[error("size arithmetic overflowed")]
    Overflow,
}
