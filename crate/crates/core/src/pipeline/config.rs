use super::{PipelineError, Result};
use crate::fairness::{DirScope, RocGridSpec};
use crate::model::OptimizerKind;
use crate::privacy::DEFAULT_DELTA;
use serde::{Deserialize, Serialize};

/// How the DP module picks its noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DpMode {
    Off,
    /// Use the configuration's `noise_multiplier`.
    Tuned,
    /// Fixed noise level: the smallest noise multiplier meeting this epsilon
    /// for the run's sampling rate and step count.
    TargetEpsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFlags {
    /// Disparate impact remover on the features.
    pub preprocessing: bool,
    pub dp: DpMode,
    /// Reject option classification on the predictions.
    pub postprocessing: bool,
}

impl ModuleFlags {
    pub const NONE: ModuleFlags = ModuleFlags {
        preprocessing: false,
        dp: DpMode::Off,
        postprocessing: false,
    };

    /// The layout searched by the Pareto experiments: DIR and tuned DP-SGD.
    pub const PARETO: ModuleFlags = ModuleFlags {
        preprocessing: true,
        dp: DpMode::Tuned,
        postprocessing: false,
    };

    pub fn dp_enabled(&self) -> bool {
        self.dp != DpMode::Off
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub repair_level: f64,
    pub noise_multiplier: f64,
    pub clipping_norm: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub modules: ModuleFlags,
    pub seed: u64,
}

impl PipelineConfig {
    /// Structural checks only; search-domain bounds live in
    /// [`crate::mobo::SearchDomain`] because the replication recipes sit
    /// outside them (e.g. 20 epochs).
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(PipelineError::Config(msg));
        if !(0.0..=1.0).contains(&self.repair_level) {
            return bad(format!("repair level {} outside [0, 1]", self.repair_level));
        }
        if !(self.noise_multiplier >= 0.0) || !self.noise_multiplier.is_finite() {
            return bad(format!("noise multiplier {}", self.noise_multiplier));
        }
        if !(self.clipping_norm > 0.0) {
            return bad(format!("clipping norm {}", self.clipping_norm));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch size must be positive".into());
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return bad(format!("learning rate {}", self.learning_rate));
        }
        if let DpMode::TargetEpsilon(e) = self.modules.dp {
            if !(e > 0.0) || !e.is_finite() {
                return bad(format!("target epsilon {e}"));
            }
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Model and dataset-specific settings that stay fixed across configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub name: String,
    pub hidden: Vec<usize>,
    pub optimizer: OptimizerKind,
    pub delta: f64,
    pub roc_grid: RocGridSpec,
    /// Columns repaired by DIR.
    pub dir_scope: DirScope,
}

impl Task {
    /// 6-6-1 ReLU network trained with Adam.
    pub fn adult() -> Self {
        Self {
            name: "adult".into(),
            hidden: vec![6, 6],
            optimizer: OptimizerKind::Adam,
            delta: DEFAULT_DELTA,
            roc_grid: RocGridSpec::default(),
            dir_scope: DirScope::AllFeatures,
        }
    }

    /// 30-30-1 ReLU network trained with SGD, for the synthetic stand-in.
    pub fn meps_like() -> Self {
        Self {
            name: "meps-like".into(),
            hidden: vec![30, 30],
            optimizer: OptimizerKind::Sgd,
            delta: DEFAULT_DELTA,
            roc_grid: RocGridSpec::default(),
            dir_scope: DirScope::AllFeatures,
        }
    }
}
