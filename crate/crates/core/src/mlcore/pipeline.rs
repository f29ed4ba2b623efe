//! The end-to-end training recipe: chronological split, standardization
//! fitted on the training rows only, training, evaluation on the held-out
//! tail.

use serde::Serialize;

use super::{
    chronological_split, evaluate, fit_standardizer, train, Averaging, Dataset, Metrics, MlError, MlpArchitecture,
    MlpModel, Standardizer, TrainConfig, TrainHistory, TRAIN_FRACTION,
};

#[derive(Debug, Clone, Serialize)]
pub struct PipelineOutcome {
    #[serde(skip)]
    pub model: MlpModel,
    pub standardizer: Standardizer,
    pub history: TrainHistory,
    /// On the test split, support-weighted.
    pub metrics: Metrics,
    pub train_rows: usize,
    pub test_rows: usize,
}

/// Rows keep their order: the first [`TRAIN_FRACTION`] trains (its trailing
/// `cfg.validation_fraction` drives early stopping), the rest tests.
pub fn run_pipeline(arch: &MlpArchitecture, data: &Dataset, cfg: &TrainConfig) -> Result<PipelineOutcome, MlError> {
    let (train_raw, test_raw) = chronological_split(data, TRAIN_FRACTION)?;
    let standardizer = fit_standardizer(&train_raw)?;
    let train_set = standardizer.transform(&train_raw)?;
    let test_set = standardizer.transform(&test_raw)?;
    let (model, history) = train(arch, &train_set, cfg)?;
    let metrics = evaluate(&model, &test_set, Averaging::Weighted)?;
    Ok(PipelineOutcome {
        model,
        standardizer,
        history,
        metrics,
        train_rows: train_raw.len(),
        test_rows: test_raw.len(),
    })
}
