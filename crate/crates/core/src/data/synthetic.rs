//! Synthetic biased datasets for offline experiments.
//!
//! Group membership and per-group label counts are drawn exactly (then
//! shuffled), so favorable-label rates are fixed by the `SyntheticSpec`:
//! `rate_g = sigmoid(BASE_LOGIT +/- bias_strength / 2)` for the privileged /
//! unprivileged group. Continuous features are unit Gaussians whose means
//! shift with the label and, more weakly, with the group; one three-level
//! categorical attribute is correlated with the group.

use super::table::mean_std;
use super::{Column, DataError, Dataset, Result};
use crate::linalg::Matrix;
use crate::rng::{self, Stream};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Bias strength giving dataset-level SPD ~0.13 and DI ~0.49.
pub const MEPS_LIKE_BIAS: f64 = 0.874;

/// Logit of the midpoint favorable rate.
const BASE_LOGIT: f64 = -1.509;
const CATEGORY_PROBS: [[f64; 3]; 2] = [[0.2, 0.3, 0.5], [0.5, 0.3, 0.2]];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_records: usize,
    pub n_continuous: usize,
    /// Fraction of records in the privileged group.
    pub group_fraction: f64,
    /// Log-odds gap between the groups' favorable rates.
    pub bias_strength: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Dataset sized like the MEPS benchmark (12540 train + 3135 test).
    pub fn meps_like(seed: u64) -> Self {
        Self {
            n_records: 15675,
            n_continuous: 10,
            group_fraction: 0.4,
            bias_strength: MEPS_LIKE_BIAS,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_records < 4 {
            return Err(DataError::BadSynthetic(format!(
                "need at least 4 records, got {}",
                self.n_records
            )));
        }
        if !(self.group_fraction > 0.0 && self.group_fraction < 1.0) {
            return Err(DataError::BadSynthetic(
                "group_fraction must be in (0, 1)".into(),
            ));
        }
        if !(self.bias_strength >= 0.0) || !self.bias_strength.is_finite() {
            return Err(DataError::BadSynthetic("bias_strength must be >= 0".into()));
        }
        Ok(())
    }

    /// Favorable-label rates (privileged, unprivileged).
    pub fn group_rates(&self) -> (f64, f64) {
        let s = |z: f64| 1.0 / (1.0 + (-z).exp());
        (
            s(BASE_LOGIT + self.bias_strength / 2.0),
            s(BASE_LOGIT - self.bias_strength / 2.0),
        )
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_records;
    let mut rng = rng::stream(spec.seed, Stream::Synthetic);

    let n_priv = ((spec.group_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let (rate_priv, rate_unpriv) = spec.group_rates();
    let pos_priv = (rate_priv * n_priv as f64).round() as usize;
    let pos_unpriv = (rate_unpriv * (n - n_priv) as f64).round() as usize;

    let mut records: Vec<(u8, u8)> = Vec::with_capacity(n);
    records.extend((0..n_priv).map(|i| (1u8, u8::from(i < pos_priv))));
    records.extend((0..n - n_priv).map(|i| (0u8, u8::from(i < pos_unpriv))));
    // keep both label classes present
    let positives = pos_priv + pos_unpriv;
    if positives == 0 {
        records[0].1 = 1;
    } else if positives == n {
        records[0].1 = 0;
    }
    records.shuffle(&mut rng);

    let d = spec.n_continuous;
    let width = d + 3;
    let mut features = Matrix::zeros(n, width);
    for (i, &(g, y)) in records.iter().enumerate() {
        let row = features.row_mut(i);
        let ys = f64::from(y) - 0.5;
        let gs = f64::from(g) - 0.5;
        for (j, x) in row.iter_mut().take(d).enumerate() {
            let label_shift = 1.2 / ((j + 1) as f64).sqrt();
            let group_shift = if j % 2 == 0 { 0.8 } else { -0.4 } / ((j + 1) as f64).sqrt();
            let z: f64 = StandardNormal.sample(&mut rng);
            *x = label_shift * ys + group_shift * gs + z;
        }
        let u: f64 = rng.random();
        let probs = CATEGORY_PROBS[g as usize];
        let k = if u < probs[0] {
            0
        } else if u < probs[0] + probs[1] {
            1
        } else {
            2
        };
        row[d + k] = 1.0;
    }
    for j in 0..d {
        let (m, s) = mean_std(&features.column(j));
        let s = if s > 0.0 { s } else { 1.0 };
        for i in 0..n {
            features.set(i, j, (features.get(i, j) - m) / s);
        }
    }

    let mut schema: Vec<Column> = (0..d)
        .map(|j| Column::continuous(format!("x{j}")))
        .collect();
    for c in ["a", "b", "c"] {
        schema.push(Column::one_hot("region", c));
    }
    let labels = records.iter().map(|r| r.1).collect();
    let protected = records.iter().map(|r| r.0).collect();
    Dataset::new(features, labels, protected, schema)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_small_is_rejected() {
        let spec = SyntheticSpec {
            n_records: 3,
            ..SyntheticSpec::meps_like(0)
        };
        assert!(generate_synthetic(&spec).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = SyntheticSpec {
            n_records: 200,
            ..SyntheticSpec::meps_like(9)
        };
        assert_eq!(
            generate_synthetic(&spec).unwrap(),
            generate_synthetic(&spec).unwrap()
        );
        let other = SyntheticSpec { seed: 10, ..spec };
        assert_ne!(
            generate_synthetic(&spec).unwrap(),
            generate_synthetic(&other).unwrap()
        );
    }

    #[test]
    fn continuous_columns_are_standardized() {
        let d = generate_synthetic(&SyntheticSpec {
            n_records: 500,
            ..SyntheticSpec::meps_like(1)
        })
        .unwrap();
        for j in d.continuous_columns() {
            let (m, s) = mean_std(&d.features().column(j));
            assert!(m.abs() < 1e-6 && (s - 1.0).abs() < 1e-6);
        }
    }
}
