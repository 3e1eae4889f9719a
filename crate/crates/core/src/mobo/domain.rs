use crate::pipeline::{ModuleFlags, PipelineConfig};
use rand::Rng;

/// Number of tuned hyperparameters.
pub const DIMS: usize = 6;

/// Names of the tuned fields in unit-cube order.
pub const FIELD_NAMES: [&str; DIMS] = [
    "repair_level",
    "noise_multiplier",
    "clipping_norm",
    "epochs",
    "learning_rate",
    "batch_size",
];

/// Box over the six tuned hyperparameters plus the fixed module layout.
///
/// The learning rate is mapped to the unit cube on a log scale; every other
/// field linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchDomain {
    pub repair_level: (f64, f64),
    pub noise_multiplier: (f64, f64),
    pub clipping_norm: (f64, f64),
    pub epochs: (usize, usize),
    pub learning_rate: (f64, f64),
    pub batch_size: (usize, usize),
    pub modules: ModuleFlags,
    /// Batch size and learning rate used by grid search.
    pub grid_batch_size: usize,
    pub grid_learning_rate: f64,
}

impl SearchDomain {
    /// Full ranges of the Pareto experiments.
    pub fn paper() -> Self {
        Self {
            repair_level: (0.0, 1.0),
            noise_multiplier: (1.0, 5.0),
            clipping_norm: (0.1, 2.0),
            epochs: (30, 128),
            learning_rate: (1e-3, 0.1),
            batch_size: (16, 64),
            modules: ModuleFlags::PARETO,
            grid_batch_size: 32,
            grid_learning_rate: 1e-2,
        }
    }

    /// Same ranges with epochs cut to [5, 20] for quick runs.
    pub fn desk() -> Self {
        Self {
            epochs: (5, 20),
            ..Self::paper()
        }
    }

    fn real_bounds(&self) -> [(f64, f64); DIMS] {
        [
            self.repair_level,
            self.noise_multiplier,
            self.clipping_norm,
            (self.epochs.0 as f64, self.epochs.1 as f64),
            (self.learning_rate.0.ln(), self.learning_rate.1.ln()),
            (self.batch_size.0 as f64, self.batch_size.1 as f64),
        ]
    }

    pub fn contains(&self, c: &PipelineConfig) -> bool {
        let inside = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        inside(c.repair_level, self.repair_level)
            && inside(c.noise_multiplier, self.noise_multiplier)
            && inside(c.clipping_norm, self.clipping_norm)
            && (self.epochs.0..=self.epochs.1).contains(&c.epochs)
            && inside(c.learning_rate, self.learning_rate)
            && (self.batch_size.0..=self.batch_size.1).contains(&c.batch_size)
    }

    /// Unit-cube coordinates of a configuration.
    pub fn to_unit(&self, c: &PipelineConfig) -> [f64; DIMS] {
        let raw = [
            c.repair_level,
            c.noise_multiplier,
            c.clipping_norm,
            c.epochs as f64,
            c.learning_rate.ln(),
            c.batch_size as f64,
        ];
        let mut u = [0.0; DIMS];
        for (k, (lo, hi)) in self.real_bounds().into_iter().enumerate() {
            u[k] = if hi > lo {
                ((raw[k] - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        u
    }

    /// Configuration at unit-cube point `u` (clipped), integer fields rounded.
    pub fn from_unit(&self, u: &[f64; DIMS], seed: u64) -> PipelineConfig {
        let b = self.real_bounds();
        let at = |k: usize| {
            let t = u[k].clamp(0.0, 1.0);
            b[k].0 + t * (b[k].1 - b[k].0)
        };
        PipelineConfig {
            repair_level: at(0),
            noise_multiplier: at(1),
            clipping_norm: at(2),
            epochs: (at(3).round() as usize).clamp(self.epochs.0, self.epochs.1),
            learning_rate: at(4)
                .exp()
                .clamp(self.learning_rate.0, self.learning_rate.1),
            batch_size: (at(5).round() as usize).clamp(self.batch_size.0, self.batch_size.1),
            modules: self.modules,
            seed,
        }
    }

    /// Round trip through [`SearchDomain::from_unit`] so candidates sit on
    /// realizable configurations.
    pub fn snap(&self, u: &[f64; DIMS]) -> [f64; DIMS] {
        self.to_unit(&self.from_unit(u, 0))
    }

    /// Random-search distribution: log-uniform learning rate and noise
    /// multiplier, uniform otherwise, integers uniform over their range.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, seed: u64) -> PipelineConfig {
        let uniform = |rng: &mut R, (lo, hi): (f64, f64)| {
            if hi > lo {
                rng.random_range(lo..=hi)
            } else {
                lo
            }
        };
        let log_uniform = |rng: &mut R, (lo, hi): (f64, f64)| {
            uniform(rng, (lo.ln(), hi.ln())).exp().clamp(lo, hi)
        };
        PipelineConfig {
            repair_level: uniform(rng, self.repair_level),
            noise_multiplier: log_uniform(rng, self.noise_multiplier),
            clipping_norm: uniform(rng, self.clipping_norm),
            epochs: rng.random_range(self.epochs.0..=self.epochs.1),
            learning_rate: log_uniform(rng, self.learning_rate),
            batch_size: rng.random_range(self.batch_size.0..=self.batch_size.1),
            modules: self.modules,
            seed,
        }
    }

    /// `levels` evenly spaced values for repair level, noise, clipping and
    /// epochs (outermost to innermost), batch size and learning rate fixed.
    pub fn grid(&self, levels: usize, seed: u64) -> Vec<PipelineConfig> {
        let lin = |(lo, hi): (f64, f64)| -> Vec<f64> {
            if levels <= 1 {
                return vec![lo];
            }
            (0..levels)
                .map(|i| {
                    if i == levels - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (levels - 1) as f64
                    }
                })
                .collect()
        };
        let epochs: Vec<usize> = lin((self.epochs.0 as f64, self.epochs.1 as f64))
            .into_iter()
            .map(|e| e.round() as usize)
            .collect();
        let mut out = Vec::with_capacity(levels.pow(4));
        for &r in &lin(self.repair_level) {
            for &s in &lin(self.noise_multiplier) {
                for &c in &lin(self.clipping_norm) {
                    for &e in &epochs {
                        out.push(PipelineConfig {
                            repair_level: r,
                            noise_multiplier: s,
                            clipping_norm: c,
                            epochs: e,
                            learning_rate: self.grid_learning_rate,
                            batch_size: self.grid_batch_size,
                            modules: self.modules,
                            seed,
                        });
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn unit_round_trip() {
        let d = SearchDomain::paper();
        let c = d.from_unit(&[0.25, 0.5, 0.75, 0.5, 0.5, 1.0], 3);
        assert_eq!(c.epochs, 79);
        assert!((c.learning_rate - 1e-2).abs() < 1e-12);
        assert_eq!(c.batch_size, 64);
        assert!(d.contains(&c));
        let back = d.from_unit(&d.to_unit(&c), 3);
        assert_eq!(back.epochs, c.epochs);
        assert!((back.noise_multiplier - c.noise_multiplier).abs() < 1e-12);
    }

    #[test]
    fn samples_stay_inside() {
        let d = SearchDomain::desk();
        let mut rng = seeded(1);
        for _ in 0..1000 {
            assert!(d.contains(&d.sample(&mut rng, 0)));
        }
    }

    #[test]
    fn grid_levels_include_endpoints() {
        let d = SearchDomain::paper();
        let g = d.grid(4, 0);
        assert_eq!(g.len(), 256);
        let mut epochs: Vec<usize> = g.iter().map(|c| c.epochs).collect();
        epochs.sort_unstable();
        epochs.dedup();
        assert_eq!(epochs, vec![30, 63, 95, 128]);
        assert!(g
            .iter()
            .all(|c| c.batch_size == 32 && c.learning_rate == 1e-2));
        assert_eq!(SearchDomain::desk().grid(3, 0).len(), 81);
    }
}
