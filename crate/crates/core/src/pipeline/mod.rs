//! The black-box objective: data, optional DIR, plain or private training,
//! optional ROC, scored as (accuracy, |SPD|, epsilon).

mod config;
mod evaluate;
mod presets;
mod record;
mod transform;

pub use config::{DpMode, ModuleFlags, PipelineConfig, Task};
pub use evaluate::{evaluate, evaluate_detailed, Evaluation, ObjectiveTriple, Splits};
pub use presets::{replication_preset, study_presets, PresetRun, Study, PRESET_NAMES, XU_EPSILONS};
pub use record::{append_record, read_records, EvalRecord, RawObjectives};
pub use transform::{
    fairness_transform, inverse_transform, objective_transform, privacy_transform,
    utility_transform, BOUNDARY_CLAMP, EPSILON_CAP, EPSILON_FLOOR,
};

use crate::data::DataError;
use crate::fairness::FairnessError;
use crate::model::ModelError;
use crate::privacy::PrivacyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("unknown study {0:?} (expected pannekoek or xu)")]
    UnknownStudy(String),
    #[error("postprocessing needs a dev split")]
    MissingDev,
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Fairness(#[from] FairnessError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Privacy(#[from] PrivacyError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;
