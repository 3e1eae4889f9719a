//! Group-fairness metrics and bias mitigation.
//!
//! Group convention throughout: `protected[i] == 1` marks the privileged
//! group, and a prediction of 1 is the favorable outcome.

mod dir;
mod roc;

pub use dir::{dir_repair, DirRepairer, DirScope};
pub use roc::{fit_roc_params, roc_postprocess, RocGridSpec, RocParams};

use thiserror::Error;

/// SPD bound of the lenient fairness threshold.
pub const LENIENT_SPD: f64 = 0.1;
/// SPD bound of the strict fairness threshold.
pub const STRICT_SPD: f64 = 0.05;
/// Acceptance band for disparate impact.
pub const DI_BAND: (f64, f64) = (0.8, 1.25);

#[derive(Debug, Error, PartialEq)]
pub enum FairnessError {
    #[error("predictions and group vector differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("the {0} group is absent")]
    GroupAbsent(&'static str),
    #[error("privileged favorable rate is zero; disparate impact is undefined")]
    UndefinedRatio,
    #[error("repair level {0} is outside [0, 1]")]
    RepairLevel(f64),
    #[error("invalid reject-option parameters: {0}")]
    InvalidRoc(String),
    #[error("reject-option grid is empty")]
    EmptyGrid,
    #[error("{0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, FairnessError>;

/// Favorable-outcome rates (privileged, unprivileged).
pub fn group_rates(preds: &[u8], protected: &[u8]) -> Result<(f64, f64)> {
    if preds.len() != protected.len() {
        return Err(FairnessError::LengthMismatch(preds.len(), protected.len()));
    }
    let mut counts = [[0usize; 2]; 2]; // [group][favorable]
    for (&p, &g) in preds.iter().zip(protected) {
        counts[usize::from(g == 1)][usize::from(p == 1)] += 1;
    }
    let n_unpriv = counts[0][0] + counts[0][1];
    let n_priv = counts[1][0] + counts[1][1];
    if n_priv == 0 {
        return Err(FairnessError::GroupAbsent("privileged"));
    }
    if n_unpriv == 0 {
        return Err(FairnessError::GroupAbsent("unprivileged"));
    }
    Ok((
        counts[1][1] as f64 / n_priv as f64,
        counts[0][1] as f64 / n_unpriv as f64,
    ))
}

/// `P(pred = 1 | privileged) - P(pred = 1 | unprivileged)`.
pub fn statistical_parity_difference(preds: &[u8], protected: &[u8]) -> Result<f64> {
    let (p, u) = group_rates(preds, protected)?;
    Ok(p - u)
}

/// `P(pred = 1 | unprivileged) / P(pred = 1 | privileged)`.
pub fn disparate_impact(preds: &[u8], protected: &[u8]) -> Result<f64> {
    let (p, u) = group_rates(preds, protected)?;
    if p == 0.0 {
        return Err(FairnessError::UndefinedRatio);
    }
    Ok(u / p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairnessReport {
    pub spd: f64,
    /// `None` when the privileged favorable rate is zero.
    pub di: Option<f64>,
    /// `|spd|`, the measure used by the replicated studies.
    pub risk_difference: f64,
}

impl FairnessReport {
    pub fn compute(preds: &[u8], protected: &[u8]) -> Result<Self> {
        let (p, u) = group_rates(preds, protected)?;
        let spd = p - u;
        Ok(Self {
            spd,
            di: (p > 0.0).then(|| u / p),
            risk_difference: spd.abs(),
        })
    }

    pub fn within_lenient(&self) -> bool {
        self.risk_difference <= LENIENT_SPD
    }

    pub fn within_strict(&self) -> bool {
        self.risk_difference <= STRICT_SPD
    }

    pub fn di_acceptable(&self) -> bool {
        self.di.is_some_and(|d| d >= DI_BAND.0 && d <= DI_BAND.1)
    }
}
