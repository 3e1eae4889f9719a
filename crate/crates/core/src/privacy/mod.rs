//! Differentially private SGD primitives and privacy accounting.

mod accountant;
mod mechanism;

pub use accountant::{
    compute_spend, default_orders, epsilon_from_rdp, noise_for_target_epsilon,
    rdp_subsampled_gaussian, DEFAULT_DELTA, SIGMA_BOUNDS,
};
pub use mechanism::{clip_per_sample, clip_rows, noisy_aggregate};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PrivacyError {
    #[error("clipping norm must be positive, got {0}")]
    ClippingNorm(f64),
    #[error("empty batch")]
    EmptyBatch,
    #[error("sampling rate {0} outside [0, 1]")]
    SamplingRate(f64),
    #[error("noise multiplier {0} is invalid")]
    NoiseMultiplier(f64),
    #[error("zero noise with a positive sampling rate is not private")]
    NonPrivate,
    #[error("RDP order {0} is below 2")]
    Order(u32),
    #[error("no RDP orders given")]
    NoOrders,
    #[error("delta {0} outside (0, 1)")]
    Delta(f64),
    #[error("target epsilon {target} is unreachable for noise multipliers in [{lo}, {hi}]")]
    Unreachable { target: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, PrivacyError>;

/// DP-SGD configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpParams {
    /// Noise standard deviation relative to the clipping norm.
    pub noise_multiplier: f64,
    /// Per-sample gradient L2 cap. `f64::INFINITY` disables clipping.
    pub clipping_norm: f64,
    pub delta: f64,
}

impl DpParams {
    pub fn new(noise_multiplier: f64, clipping_norm: f64, delta: f64) -> Result<Self> {
        let p = Self {
            noise_multiplier,
            clipping_norm,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_multiplier >= 0.0) || !self.noise_multiplier.is_finite() {
            return Err(PrivacyError::NoiseMultiplier(self.noise_multiplier));
        }
        if !(self.clipping_norm > 0.0) {
            return Err(PrivacyError::ClippingNorm(self.clipping_norm));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(PrivacyError::Delta(self.delta));
        }
        Ok(())
    }

    /// `delta < 1/n` for a training set of `n` records.
    pub fn delta_ok_for(&self, n: usize) -> bool {
        self.delta < 1.0 / n as f64
    }
}

/// Privacy budget spent by a training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacySpend {
    /// `f64::INFINITY` when the run was not private (zero noise).
    pub epsilon: f64,
    pub delta: f64,
    pub steps: u64,
    pub sampling_rate: f64,
}
