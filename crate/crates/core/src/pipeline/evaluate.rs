use super::config::{DpMode, PipelineConfig, Task};
use super::transform::{objective_transform, EPSILON_CAP};
use super::{PipelineError, Result};
use crate::data::{Dataset, Preprocessed};
use crate::fairness::{
    fit_roc_params, roc_postprocess, statistical_parity_difference, DirRepairer, RocParams,
};
use crate::model::{accuracy, predict_labels, train, MlpSpec, ModelError, TrainSpec};
use crate::privacy::{noise_for_target_epsilon, DpParams};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Train / dev / test data for one experiment. `dev` is only consulted by
/// the postprocessing stage.
#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub dev: Option<Dataset>,
    pub test: Dataset,
}

impl Splits {
    pub fn new(train: Dataset, dev: Dataset, test: Dataset) -> Self {
        Self {
            train,
            dev: Some(dev),
            test,
        }
    }

    /// Keep the dev split only when postprocessing needs it; otherwise fold it
    /// back into training.
    pub fn for_postprocessing(pre: &Preprocessed, postprocessing: bool) -> Result<Self> {
        if postprocessing {
            Ok(Self::new(
                pre.train.clone(),
                pre.dev.clone(),
                pre.test.clone(),
            ))
        } else {
            Ok(Self {
                train: pre.train.concat(&pre.dev)?,
                dev: None,
                test: pre.test.clone(),
            })
        }
    }

    /// Same as [`Splits::for_postprocessing`] for an already split dataset.
    pub fn from_parts(
        train: Dataset,
        dev: Dataset,
        test: Dataset,
        postprocessing: bool,
    ) -> Result<Self> {
        if postprocessing {
            Ok(Self::new(train, dev, test))
        } else {
            Ok(Self {
                train: train.concat(&dev)?,
                dev: None,
                test,
            })
        }
    }
}

/// Raw objectives plus their transformed image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTriple {
    pub accuracy: f64,
    /// Absolute statistical parity difference on the test split.
    pub spd: f64,
    pub epsilon: f64,
    pub transformed: [f64; 3],
}

impl ObjectiveTriple {
    pub fn new(accuracy: f64, spd: f64, epsilon: f64) -> Self {
        let spd = spd.abs();
        let epsilon = epsilon.min(EPSILON_CAP);
        Self {
            accuracy,
            spd,
            epsilon,
            transformed: objective_transform(accuracy, spd, epsilon),
        }
    }

    /// Stand-in for failed evaluations: no accuracy, maximal disparity, no privacy.
    pub fn worst() -> Self {
        Self::new(0.0, 1.0, EPSILON_CAP)
    }
}

/// Everything observed while evaluating one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub config: PipelineConfig,
    pub objectives: ObjectiveTriple,
    /// Noise multiplier actually used when DP was on.
    pub noise_multiplier: Option<f64>,
    pub roc: Option<RocParams>,
    pub loss_log: Vec<f64>,
    /// Reason the run was scored with [`ObjectiveTriple::worst`].
    pub failure: Option<String>,
    pub wall_time_s: f64,
}

/// Run the pipeline and return its objectives.
pub fn evaluate(config: &PipelineConfig, task: &Task, splits: &Splits) -> Result<ObjectiveTriple> {
    evaluate_detailed(config, task, splits).map(|e| e.objectives)
}

/// DIR on the features (maps fitted on train), DP or plain training, then ROC
/// fitted on dev and applied to test. Divergent training is reported as a
/// failed evaluation with worst-case objectives instead of an error.
pub fn evaluate_detailed(
    config: &PipelineConfig,
    task: &Task,
    splits: &Splits,
) -> Result<Evaluation> {
    config.validate()?;
    let start = Instant::now();
    let flags = config.modules;
    if flags.postprocessing && splits.dev.is_none() {
        return Err(PipelineError::MissingDev);
    }

    let (train_set, dev_set, test_set) = if flags.preprocessing {
        let repairer = DirRepairer::fit_scope(&splits.train, task.dir_scope);
        let level = config.repair_level;
        let dev = match &splits.dev {
            Some(d) if flags.postprocessing => Some(repairer.repair(d, level)?),
            _ => None,
        };
        (
            repairer.repair(&splits.train, level)?,
            dev,
            repairer.repair(&splits.test, level)?,
        )
    } else {
        let dev = if flags.postprocessing {
            splits.dev.clone()
        } else {
            None
        };
        (splits.train.clone(), dev, splits.test.clone())
    };

    let n = train_set.len();
    let batch_size = config.batch_size.min(n);
    let steps = (config.epochs * n.div_ceil(batch_size)) as u64;
    let q = batch_size as f64 / n as f64;
    let noise_multiplier = match flags.dp {
        DpMode::Off => None,
        DpMode::Tuned => Some(config.noise_multiplier),
        DpMode::TargetEpsilon(eps) => Some(noise_for_target_epsilon(eps, q, steps, task.delta)?),
    };
    let dp = match noise_multiplier {
        Some(sigma) => Some(DpParams::new(sigma, config.clipping_norm, task.delta)?),
        None => None,
    };
    let mlp = MlpSpec::new(train_set.n_features(), &task.hidden, config.seed);
    let spec = TrainSpec {
        epochs: config.epochs,
        batch_size,
        learning_rate: config.learning_rate,
        optimizer: task.optimizer,
        dp,
        seed: config.seed,
    };

    let trained = match train(&train_set, &mlp, &spec) {
        Ok(t) => t,
        Err(e @ ModelError::NonFinite { .. }) => {
            return Ok(Evaluation {
                config: *config,
                objectives: ObjectiveTriple::worst(),
                noise_multiplier,
                roc: None,
                loss_log: Vec::new(),
                failure: Some(e.to_string()),
                wall_time_s: start.elapsed().as_secs_f64(),
            });
        }
        Err(e) => return Err(e.into()),
    };

    let test_scores = trained.forward(test_set.features())?;
    let (preds, roc) = match &dev_set {
        Some(dev) => {
            let dev_scores = trained.forward(dev.features())?;
            let params =
                fit_roc_params(&dev_scores, dev.protected(), dev.labels(), &task.roc_grid)?;
            (
                roc_postprocess(&test_scores, test_set.protected(), &params)?,
                Some(params),
            )
        }
        None => (predict_labels(&test_scores, 0.5), None),
    };
    let acc = accuracy(&preds, test_set.labels())?;
    let spd = statistical_parity_difference(&preds, test_set.protected())?;
    let epsilon = trained.privacy.map_or(EPSILON_CAP, |p| p.epsilon);

    Ok(Evaluation {
        config: *config,
        objectives: ObjectiveTriple::new(acc, spd, epsilon),
        noise_multiplier,
        roc,
        loss_log: trained.loss_log,
        failure: None,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
