use super::pareto::{dominates, hypervolume, pareto_filter};
use crate::pipeline::{objective_transform, ObjectiveTriple, PipelineConfig};

/// Transformed image of (accuracy 0, |SPD| 1, epsilon 1).
pub fn default_reference() -> [f64; 3] {
    objective_transform(0.0, 1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub config: PipelineConfig,
    pub objectives: ObjectiveTriple,
    pub failed: bool,
}

/// Every evaluation in order, the indices of the non-dominated ones, and
/// the hypervolume after each evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
    front: Vec<usize>,
    reference: [f64; 3],
    hv_trace: Vec<f64>,
}

impl Default for ParetoArchive {
    fn default() -> Self {
        Self::new(default_reference())
    }
}

impl ParetoArchive {
    pub fn new(reference: [f64; 3]) -> Self {
        Self {
            entries: Vec::new(),
            front: Vec::new(),
            reference,
            hv_trace: Vec::new(),
        }
    }

    pub fn push(&mut self, config: PipelineConfig, objectives: ObjectiveTriple, failed: bool) {
        let y = objectives.transformed;
        let idx = self.entries.len();
        self.entries.push(ArchiveEntry {
            config,
            objectives,
            failed,
        });
        let prev = self.hv_trace.last().copied().unwrap_or(0.0);
        let dominated = self
            .front
            .iter()
            .any(|&f| dominates(&self.entries[f].objectives.transformed, &y));
        if dominated {
            self.hv_trace.push(prev);
            return;
        }
        self.front
            .retain(|&f| !dominates(&y, &self.entries[f].objectives.transformed));
        self.front.push(idx);
        let counts = y.iter().zip(&self.reference).all(|(a, r)| a > r);
        let hv = if counts {
            hypervolume(&self.front_points(), &self.reference)
        } else {
            prev
        };
        self.hv_trace.push(hv);
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices of non-dominated entries, ascending.
    pub fn front(&self) -> &[usize] {
        &self.front
    }

    pub fn front_points(&self) -> Vec<[f64; 3]> {
        self.front
            .iter()
            .map(|&i| self.entries[i].objectives.transformed)
            .collect()
    }

    pub fn reference(&self) -> [f64; 3] {
        self.reference
    }

    pub fn hv_trace(&self) -> &[f64] {
        &self.hv_trace
    }

    pub fn hypervolume(&self) -> f64 {
        self.hv_trace.last().copied().unwrap_or(0.0)
    }

    /// Brute-force recomputation of the front, for checking.
    pub fn recomputed_front(&self) -> Vec<usize> {
        let pts: Vec<[f64; 3]> = self
            .entries
            .iter()
            .map(|e| e.objectives.transformed)
            .collect();
        pareto_filter(&pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::replication_preset;

    fn cfg() -> PipelineConfig {
        replication_preset("S-NN", None).unwrap()
    }

    #[test]
    fn dominated_point_keeps_volume() {
        let mut a = ParetoArchive::default();
        a.push(cfg(), ObjectiveTriple::new(0.8, 0.05, 0.5), false);
        let hv = a.hypervolume();
        assert!(hv > 0.0);
        a.push(cfg(), ObjectiveTriple::new(0.7, 0.06, 0.6), false);
        assert_eq!(a.hypervolume(), hv);
        assert_eq!(a.front(), &[0]);
        a.push(cfg(), ObjectiveTriple::new(0.85, 0.1, 0.5), false);
        assert_eq!(a.front(), &[0, 2]);
        assert!(a.hypervolume() > hv);
        assert_eq!(a.front(), a.recomputed_front().as_slice());
        assert!(a.hv_trace().windows(2).all(|w| w[1] >= w[0]));
    }
}
