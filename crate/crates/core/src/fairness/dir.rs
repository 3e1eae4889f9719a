//! Disparate impact remover.
//!
//! Each continuous feature is repaired group by group: a value's position in
//! its own group's empirical distribution is mapped onto the median
//! distribution (the per-quantile median across groups), and the repair
//! level interpolates linearly between the original value (0) and that target
//! (1). Empirical quantile functions interpolate linearly, so unequal group
//! sizes are handled and within-group order is preserved. By default only
//! continuous columns are repaired; [`DirScope::AllFeatures`] also treats the
//! one-hot indicator columns as numeric features. Labels and groups are
//! untouched.

use super::{FairnessError, Result};
use crate::data::Dataset;

/// Sorted per-group samples of one feature.
#[derive(Debug, Clone)]
struct FeatureQuantiles {
    column: usize,
    /// Index 0: unprivileged, index 1: privileged.
    sorted: [Vec<f64>; 2],
}

fn quantile(sorted: &[f64], u: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = u.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Position of `v` in `sorted` as a fraction in [0, 1]; inverse of
/// [`quantile`] on the sample. A value equal to a run of sample values is
/// the `tie`-th of `ties` records sharing it and is spread evenly over the
/// run, so on the fitting data itself positions are exact ordinal ranks.
fn position(sorted: &[f64], v: f64, tie: usize, ties: usize) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return 0.5;
    }
    let below = sorted.partition_point(|&x| x < v);
    let through = sorted.partition_point(|&x| x <= v);
    let idx = if through > below {
        let span = (through - below - 1) as f64;
        if ties > 1 {
            below as f64 + span * tie as f64 / (ties - 1) as f64
        } else {
            below as f64 + span / 2.0
        }
    } else if below == 0 {
        0.0
    } else if below == n {
        (n - 1) as f64
    } else {
        let (a, b) = (sorted[below - 1], sorted[below]);
        (below - 1) as f64 + (v - a) / (b - a)
    };
    idx / (n - 1) as f64
}

/// For each record, its order among same-group records holding the same
/// value (by row index) and the size of that tie group.
fn tie_ranks(values: &[f64], groups: &[u8]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        groups[i]
            .cmp(&groups[j])
            .then(values[i].total_cmp(&values[j]))
            .then(i.cmp(&j))
    });
    let mut out = vec![(0, 1); values.len()];
    let mut start = 0;
    while start < order.len() {
        let (g, v) = (groups[order[start]], values[order[start]]);
        let mut end = start;
        while end < order.len() && groups[order[end]] == g && values[order[end]] == v {
            end += 1;
        }
        for (k, &i) in order[start..end].iter().enumerate() {
            out[i] = (k, end - start);
        }
        start = end;
    }
    out
}

/// Which feature columns the repairer modifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirScope {
    #[default]
    Continuous,
    /// Every feature column, indicator columns included.
    AllFeatures,
}

/// Quantile maps learned on one dataset, reusable on others with the same
/// schema.
#[derive(Debug, Clone)]
pub struct DirRepairer {
    features: Vec<FeatureQuantiles>,
}

impl DirRepairer {
    /// Repairs the continuous columns.
    pub fn fit(data: &Dataset) -> Self {
        Self::fit_scope(data, DirScope::Continuous)
    }

    pub fn fit_scope(data: &Dataset, scope: DirScope) -> Self {
        let columns = match scope {
            DirScope::Continuous => data.continuous_columns(),
            DirScope::AllFeatures => (0..data.n_features()).collect(),
        };
        let features = columns
            .into_iter()
            .map(|column| {
                let mut sorted = [Vec::new(), Vec::new()];
                for (row, &g) in data.features().iter_rows().zip(data.protected()) {
                    sorted[usize::from(g == 1)].push(row[column]);
                }
                for s in &mut sorted {
                    s.sort_by(f64::total_cmp);
                }
                FeatureQuantiles { column, sorted }
            })
            .collect();
        Self { features }
    }

    /// Columns this repairer modifies.
    pub fn columns(&self) -> Vec<usize> {
        self.features.iter().map(|f| f.column).collect()
    }

    pub fn repair(&self, data: &Dataset, repair_level: f64) -> Result<Dataset> {
        if !(0.0..=1.0).contains(&repair_level) {
            return Err(FairnessError::RepairLevel(repair_level));
        }
        let mut features = data.features().clone();
        if repair_level > 0.0 {
            for fq in &self.features {
                let values = features.column(fq.column);
                let ranks = tie_ranks(&values, data.protected());
                for (i, &g) in data.protected().iter().enumerate() {
                    let v = values[i];
                    let own = &fq.sorted[usize::from(g == 1)];
                    let (tie, ties) = ranks[i];
                    let u = position(own, v, tie, ties);
                    // median of two values is their mean
                    let target = 0.5 * (quantile(&fq.sorted[0], u) + quantile(&fq.sorted[1], u));
                    features.set(
                        i,
                        fq.column,
                        (1.0 - repair_level) * v + repair_level * target,
                    );
                }
            }
        }
        data.with_features(features)
            .map_err(|e| FairnessError::Data(e.to_string()))
    }
}

/// Fit the quantile maps on `data` and repair it.
pub fn dir_repair(data: &Dataset, repair_level: f64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&repair_level) {
        return Err(FairnessError::RepairLevel(repair_level));
    }
    DirRepairer::fit(data).repair(data, repair_level)
}
