//! Dense binary classifiers trained with plain or differentially private
//! minibatch optimizers.

mod mlp;
mod optim;
mod train;

pub use mlp::{Mlp, MlpSpec, Workspace};
pub use optim::{OptimizerKind, OptimizerState, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use train::{train, TrainSpec, TrainedModel};

use crate::data::Dataset;
use crate::privacy::PrivacyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model specification: {0}")]
    Spec(String),
    #[error("expected {expected} input features, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("shape mismatch: expected {expected}, got {found}")]
    Shape { expected: usize, found: usize },
    #[error("empty batch")]
    EmptyBatch,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("training diverged in epoch {epoch}")]
    NonFinite { epoch: usize },
    #[error("weight file: {0}")]
    Format(String),
    #[error(transparent)]
    Privacy(#[from] PrivacyError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Hard predictions, `score >= threshold` being favorable.
pub fn predict_labels(scores: &[f64], threshold: f64) -> Vec<u8> {
    scores.iter().map(|&s| u8::from(s >= threshold)).collect()
}

pub fn accuracy(preds: &[u8], labels: &[u8]) -> Result<f64> {
    if labels.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if preds.len() != labels.len() {
        return Err(ModelError::Shape {
            expected: labels.len(),
            found: preds.len(),
        });
    }
    let correct = preds.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok(correct as f64 / labels.len() as f64)
}

pub fn evaluate_accuracy(model: &Mlp, data: &Dataset, threshold: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let scores = model.forward(data.features())?;
    accuracy(&predict_labels(&scores, threshold), data.labels())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_goes_to_favorable() {
        let preds = predict_labels(&[0.5, 0.5, 0.5], 0.5);
        assert_eq!(accuracy(&preds, &[1, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn hand_counted_accuracy() {
        // predictions 1,0,1,1,0 vs labels 1,1,0,1,0 -> 3 of 5
        let preds = predict_labels(&[0.9, 0.2, 0.6, 0.51, 0.49], 0.5);
        assert_eq!(accuracy(&preds, &[1, 1, 0, 1, 0]).unwrap(), 0.6);
        assert!(matches!(accuracy(&[], &[]), Err(ModelError::EmptyDataset)));
    }
}
