use super::mlp::{Mlp, MlpSpec};
use super::optim::{OptimizerKind, OptimizerState};
use super::{ModelError, Result};
use crate::data::Dataset;
use crate::linalg::Matrix;
use crate::privacy::{clip_rows, compute_spend, noisy_aggregate, DpParams, PrivacySpend};
use crate::rng::{self, Stream};
use rand::seq::SliceRandom;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSpec {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub dp: Option<DpParams>,
    /// Drives minibatch shuffling and gradient noise.
    pub seed: u64,
}

impl TrainSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.epochs == 0 {
            return Err(ModelError::Spec("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 || self.batch_size > n {
            return Err(ModelError::Spec(format!(
                "batch size {} must be in [1, {n}]",
                self.batch_size
            )));
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(ModelError::Spec(format!(
                "learning rate {}",
                self.learning_rate
            )));
        }
        if let Some(dp) = &self.dp {
            dp.validate()?;
        }
        Ok(())
    }

    pub fn steps_per_epoch(&self, n: usize) -> usize {
        n.div_ceil(self.batch_size)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub mlp: Mlp,
    /// Mean training loss of each epoch, measured before each update.
    pub loss_log: Vec<f64>,
    /// Present exactly when training was private.
    pub privacy: Option<PrivacySpend>,
}

impl TrainedModel {
    pub fn forward(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.mlp.forward(x)
    }
}

pub fn train(data: &Dataset, mlp: &MlpSpec, spec: &TrainSpec) -> Result<TrainedModel> {
    mlp.validate()?;
    let n = data.len();
    spec.validate(n)?;
    let mut model = Mlp::init(mlp)?;
    if model.input_width() != data.n_features() {
        return Err(ModelError::Dimension {
            expected: model.input_width(),
            found: data.n_features(),
        });
    }
    let p = model.n_params();
    let mut opt = OptimizerState::new(spec.optimizer, p);
    let mut shuffle_rng = rng::stream(spec.seed, Stream::Shuffle);
    let mut noise_rng = rng::stream(spec.seed, Stream::Noise);
    let mut ws = model.workspace();
    let x = data.features();
    let y = data.labels();
    let b = spec.batch_size;
    let mut full = Matrix::zeros(b, p);
    let mut partial = Matrix::zeros(n % b, p);
    let mut order: Vec<usize> = (0..n).collect();
    let mut loss_log = Vec::with_capacity(spec.epochs);

    for epoch in 0..spec.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(b) {
            let grads = if chunk.len() == b {
                &mut full
            } else {
                &mut partial
            };
            for (r, &i) in chunk.iter().enumerate() {
                epoch_loss +=
                    model.sample_gradient(x.row(i), f64::from(y[i]), &mut ws, grads.row_mut(r));
            }
            let step = match &spec.dp {
                Some(dp) => {
                    if dp.clipping_norm.is_finite() {
                        clip_rows(grads, dp.clipping_norm)?;
                    }
                    noisy_aggregate(grads, dp.clipping_norm, dp.noise_multiplier, &mut noise_rng)?
                }
                None => mean_rows(grads),
            };
            opt.step(model.params_mut(), &step, spec.learning_rate)?;
        }
        let mean = epoch_loss / n as f64;
        if !mean.is_finite() || model.params().iter().any(|w| !w.is_finite()) {
            return Err(ModelError::NonFinite { epoch });
        }
        loss_log.push(mean);
    }

    let privacy = match &spec.dp {
        Some(dp) => {
            let steps = (spec.epochs * spec.steps_per_epoch(n)) as u64;
            let q = b as f64 / n as f64;
            Some(compute_spend(dp.noise_multiplier, q, steps, dp.delta)?)
        }
        None => None,
    };
    Ok(TrainedModel {
        mlp: model,
        loss_log,
        privacy,
    })
}

/// Row sum in row order, then divided by the row count; the same arithmetic
/// as a noiseless private aggregate.
fn mean_rows(m: &Matrix) -> Vec<f64> {
    let mut sum = vec![0.0; m.cols()];
    for row in m.iter_rows() {
        for (s, g) in sum.iter_mut().zip(row) {
            *s += g;
        }
    }
    let b = m.rows() as f64;
    sum.iter_mut().for_each(|s| *s /= b);
    sum
}
