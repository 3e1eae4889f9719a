//! Module layouts reproducing two earlier fairness/privacy studies on Adult.
//!
//! Both use batch 20, learning rate 1e-3, clipping norm 1 and, where DIR is
//! on, full repair. The neural-network study trains for 20 epochs; the
//! logistic-regression study for 100 epochs, with the 6-6-1 network standing
//! in for the original models.

use super::config::{DpMode, ModuleFlags, PipelineConfig};
use super::{PipelineError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    /// S-NN, DP-NN, F-NN, DPF-NN at epsilon 0.1.
    Pannekoek,
    /// PrivLR, PFLR, PFLR* at epsilon 0.1, 1 and 10.
    Xu,
}

impl std::str::FromStr for Study {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pannekoek" => Ok(Study::Pannekoek),
            "xu" => Ok(Study::Xu),
            _ => Err(PipelineError::UnknownStudy(s.to_string())),
        }
    }
}

pub const PRESET_NAMES: [&str; 8] = [
    "S-NN", "F-NN", "DP-NN", "DPF-NN", "PrivLR", "FairLR", "PFLR", "PFLR*",
];
pub const XU_EPSILONS: [f64; 3] = [0.1, 1.0, 10.0];
const PANNEKOEK_EPSILON: f64 = 0.1;

/// One row of a replication study.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    pub model: &'static str,
    pub epsilon: Option<f64>,
    pub config: PipelineConfig,
}

fn base(epochs: usize, preprocessing: bool, dp: DpMode, postprocessing: bool) -> PipelineConfig {
    PipelineConfig {
        repair_level: if preprocessing { 1.0 } else { 0.0 },
        noise_multiplier: 0.0,
        clipping_norm: 1.0,
        epochs,
        learning_rate: 1e-3,
        batch_size: 20,
        modules: ModuleFlags {
            preprocessing,
            dp,
            postprocessing,
        },
        seed: 0,
    }
}

/// Configuration for a named model. `epsilon` is the privacy target of the
/// DP models: it defaults to 0.1 for the neural-network study and is
/// required for PrivLR, PFLR and PFLR*.
pub fn replication_preset(name: &str, epsilon: Option<f64>) -> Result<PipelineConfig> {
    let unknown = || PipelineError::UnknownPreset(name.to_string());
    let needs_eps = || epsilon.map(DpMode::TargetEpsilon).ok_or_else(unknown);
    let nn_eps = DpMode::TargetEpsilon(epsilon.unwrap_or(PANNEKOEK_EPSILON));
    let config = match name {
        "S-NN" => base(20, false, DpMode::Off, false),
        "F-NN" => base(20, false, DpMode::Off, true),
        "DP-NN" => base(20, false, nn_eps, false),
        "DPF-NN" => base(20, false, nn_eps, true),
        "PrivLR" => base(100, false, needs_eps()?, false),
        "FairLR" => base(100, true, DpMode::Off, false),
        "PFLR" => base(100, true, needs_eps()?, false),
        "PFLR*" => base(100, true, needs_eps()?, true),
        _ => return Err(unknown()),
    };
    Ok(config)
}

/// Rows in the order the studies report them.
pub fn study_presets(study: Study) -> Vec<PresetRun> {
    let row = |model: &'static str, epsilon: Option<f64>| PresetRun {
        model,
        epsilon,
        config: replication_preset(model, epsilon).expect("built-in preset"),
    };
    match study {
        Study::Pannekoek => vec![
            row("S-NN", None),
            row("DP-NN", Some(PANNEKOEK_EPSILON)),
            row("F-NN", None),
            row("DPF-NN", Some(PANNEKOEK_EPSILON)),
        ],
        Study::Xu => ["PrivLR", "PFLR", "PFLR*"]
            .iter()
            .flat_map(|&m| XU_EPSILONS.iter().map(move |&e| (m, e)))
            .map(|(m, e)| row(m, Some(e)))
            .collect(),
    }
}
