//! Reject option classification.
//!
//! Scores outside the critical band `[threshold - margin, threshold + margin]`
//! are thresholded as usual (`score >= threshold` is favorable). Inside the
//! band the label follows group membership: unprivileged instances receive
//! the favorable label, privileged ones the unfavorable label. A zero margin
//! is an empty band, i.e. plain thresholding.

use super::{statistical_parity_difference, FairnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocParams {
    pub classification_threshold: f64,
    pub margin: f64,
}

impl RocParams {
    pub fn new(classification_threshold: f64, margin: f64) -> Result<Self> {
        let p = Self {
            classification_threshold,
            margin,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.classification_threshold;
        let m = self.margin;
        if !(t > 0.0 && t < 1.0) {
            return Err(FairnessError::InvalidRoc(format!(
                "threshold {t} outside (0, 1)"
            )));
        }
        if !(m >= 0.0) {
            return Err(FairnessError::InvalidRoc(format!("negative margin {m}")));
        }
        if m > 0.0 && !(t - m > 0.0 && t + m < 1.0) {
            return Err(FairnessError::InvalidRoc(format!(
                "band [{}, {}] leaves (0, 1)",
                t - m,
                t + m
            )));
        }
        Ok(())
    }

    #[inline]
    fn label(&self, score: f64, privileged: bool) -> u8 {
        let t = self.classification_threshold;
        if self.margin > 0.0 && score >= t - self.margin && score <= t + self.margin {
            u8::from(!privileged)
        } else {
            u8::from(score >= t)
        }
    }
}

pub fn roc_postprocess(scores: &[f64], protected: &[u8], params: &RocParams) -> Result<Vec<u8>> {
    params.validate()?;
    if scores.len() != protected.len() {
        return Err(FairnessError::LengthMismatch(scores.len(), protected.len()));
    }
    Ok(scores
        .iter()
        .zip(protected)
        .map(|(&s, &g)| params.label(s, g == 1))
        .collect())
}

/// Candidate thresholds and margins for [`fit_roc_params`].
#[derive(Debug, Clone, PartialEq)]
pub struct RocGridSpec {
    pub thresholds: Vec<f64>,
    pub margins: Vec<f64>,
}

impl Default for RocGridSpec {
    /// Thresholds 0.01..=0.99 and margins 0..=0.25, both in steps of 0.01.
    fn default() -> Self {
        Self {
            thresholds: (1..=99).map(|i| f64::from(i) / 100.0).collect(),
            margins: (0..=25).map(|i| f64::from(i) / 100.0).collect(),
        }
    }
}

impl RocGridSpec {
    pub fn single(threshold: f64, margin: f64) -> Self {
        Self {
            thresholds: vec![threshold],
            margins: vec![margin],
        }
    }
}

/// Grid search for the band minimizing `|SPD|` of the postprocessed
/// predictions. Ties go to higher accuracy, then to the smaller margin, then
/// to grid order. Cells whose band leaves (0, 1) are skipped.
pub fn fit_roc_params(
    scores: &[f64],
    protected: &[u8],
    labels: &[u8],
    grid: &RocGridSpec,
) -> Result<RocParams> {
    if scores.len() != labels.len() {
        return Err(FairnessError::LengthMismatch(scores.len(), labels.len()));
    }
    let mut best: Option<(f64, f64, RocParams)> = None;
    for &t in &grid.thresholds {
        for &m in &grid.margins {
            let Ok(params) = RocParams::new(t, m) else {
                continue;
            };
            let preds = roc_postprocess(scores, protected, &params)?;
            let spd = statistical_parity_difference(&preds, protected)?.abs();
            let correct = preds.iter().zip(labels).filter(|(p, y)| p == y).count();
            let acc = correct as f64 / labels.len().max(1) as f64;
            let better = match &best {
                None => true,
                Some((b_spd, b_acc, b_params)) => {
                    spd < *b_spd
                        || (spd == *b_spd
                            && (acc > *b_acc || (acc == *b_acc && m < b_params.margin)))
                }
            };
            if better {
                best = Some((spd, acc, params));
            }
        }
    }
    best.map(|(_, _, p)| p).ok_or(FairnessError::EmptyGrid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_margin_is_plain_thresholding() {
        let scores = [0.1, 0.5, 0.49, 0.9, 0.5, 0.7];
        let groups = [0, 0, 1, 1, 1, 0];
        let out = roc_postprocess(&scores, &groups, &RocParams::new(0.5, 0.0).unwrap()).unwrap();
        assert_eq!(out, vec![0, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn unprivileged_at_threshold_is_favorable() {
        let p = RocParams::new(0.5, 0.1).unwrap();
        assert_eq!(roc_postprocess(&[0.5], &[0], &p).unwrap(), vec![1]);
        assert_eq!(roc_postprocess(&[0.5], &[1], &p).unwrap(), vec![0]);
    }

    #[test]
    fn scores_straddling_the_band() {
        // band [0.4, 0.6]
        let p = RocParams::new(0.5, 0.1).unwrap();
        let scores = [0.35, 0.45, 0.55, 0.65, 0.42, 0.58];
        let groups = [0, 0, 1, 1, 1, 0];
        // 0.35 below band -> 0; 0.45 unpriv in band -> 1; 0.55 priv in band -> 0;
        // 0.65 above band -> 1; 0.42 priv in band -> 0; 0.58 unpriv in band -> 1
        assert_eq!(
            roc_postprocess(&scores, &groups, &p).unwrap(),
            vec![0, 1, 0, 1, 0, 1]
        );
    }

    #[test]
    fn invalid_params() {
        assert!(RocParams::new(0.0, 0.0).is_err());
        assert!(RocParams::new(0.2, 0.2).is_err());
        assert!(RocParams::new(0.5, -0.1).is_err());
        assert!(RocParams::new(0.9, 0.05).is_ok());
    }

    #[test]
    fn singleton_grid_returns_its_cell() {
        let p = fit_roc_params(
            &[0.2, 0.8],
            &[0, 1],
            &[0, 1],
            &RocGridSpec::single(0.3, 0.05),
        )
        .unwrap();
        assert_eq!(p, RocParams::new(0.3, 0.05).unwrap());
    }

    #[test]
    fn grid_of_only_invalid_cells_is_empty() {
        let r = fit_roc_params(
            &[0.2, 0.8],
            &[0, 1],
            &[0, 1],
            &RocGridSpec::single(0.1, 0.2),
        );
        assert_eq!(r, Err(FairnessError::EmptyGrid));
    }
}
