//! Monte-Carlo expected hypervolume improvement and its maximization over a
//! candidate pool.

use super::archive::ParetoArchive;
use super::domain::{SearchDomain, DIMS};
use super::gp::{Gp, GpFitOptions};
use super::pareto::{hypervolume, hypervolume_improvement};
use super::Result;
use crate::pipeline::PipelineConfig;
use crate::rng::{self, derive_seed, Stream};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// One GP per transformed objective.
#[derive(Debug, Clone)]
pub struct SurrogateSet {
    pub gps: [Gp; 3],
}

impl SurrogateSet {
    /// Fit on the archive's configurations mapped into the unit cube.
    pub fn fit(
        archive: &ParetoArchive,
        domain: &SearchDomain,
        opts: &GpFitOptions,
    ) -> Result<Self> {
        let x: Vec<Vec<f64>> = archive
            .entries()
            .iter()
            .map(|e| domain.to_unit(&e.config).to_vec())
            .collect();
        let fit = |k: usize| {
            let y: Vec<f64> = archive
                .entries()
                .iter()
                .map(|e| e.objectives.transformed[k])
                .collect();
            let o = GpFitOptions {
                seed: derive_seed(opts.seed, k as u64),
                ..opts.clone()
            };
            Gp::fit(&x, &y, &o)
        };
        Ok(Self {
            gps: [fit(0)?, fit(1)?, fit(2)?],
        })
    }

    /// Marginal posterior means and variances at `x`.
    pub fn predict(&self, x: &[f64]) -> ([f64; 3], [f64; 3]) {
        let mut mean = [0.0; 3];
        let mut var = [0.0; 3];
        for k in 0..3 {
            (mean[k], var[k]) = self.gps[k].predict(x);
        }
        (mean, var)
    }
}

/// `n_mc` standard normal triples shared by every candidate of one proposal.
pub fn normal_draws(n_mc: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = rng::stream(seed, Stream::Acquisition);
    (0..n_mc)
        .map(|_| {
            let mut z = [0.0; 3];
            for v in &mut z {
                *v = StandardNormal.sample(&mut rng);
            }
            z
        })
        .collect()
}

/// Mean hypervolume improvement over samples `mean + sqrt(var) * z` from
/// independent marginals.
pub fn ehvi_from_moments(
    mean: [f64; 3],
    var: [f64; 3],
    front: &[[f64; 3]],
    base: f64,
    reference: &[f64; 3],
    draws: &[[f64; 3]],
) -> f64 {
    let sd = var.map(|v| v.max(0.0).sqrt());
    let total: f64 = draws
        .iter()
        .map(|z| {
            let y = [
                mean[0] + sd[0] * z[0],
                mean[1] + sd[1] * z[1],
                mean[2] + sd[2] * z[2],
            ];
            hypervolume_improvement(front, base, &y, reference)
        })
        .sum();
    total / draws.len() as f64
}

/// EHVI of the surrogates at unit-cube point `x` against the archive front.
pub fn ehvi(
    surrogates: &SurrogateSet,
    x: &[f64],
    archive: &ParetoArchive,
    n_mc: usize,
    seed: u64,
) -> f64 {
    let front = archive.front_points();
    let reference = archive.reference();
    let base = hypervolume(&front, &reference);
    let (m, v) = surrogates.predict(x);
    ehvi_from_moments(
        m,
        v,
        &front,
        base,
        &reference,
        &normal_draws(n_mc.max(1), seed),
    )
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const HALTON_BASES: [u64; DIMS] = [2, 3, 5, 7, 11, 13];

/// Halton points 1..=n with a seeded random shift modulo 1.
pub fn halton_candidates(n: usize, seed: u64) -> Vec<[f64; DIMS]> {
    let mut rng = rng::stream(seed, Stream::Acquisition);
    let shift: [f64; DIMS] = std::array::from_fn(|_| rng.random::<f64>());
    (1..=n as u64)
        .map(|i| std::array::from_fn(|k| (radical_inverse(i, HALTON_BASES[k]) + shift[k]).fract()))
        .collect()
}

#[derive(Debug, Clone)]
pub struct AcquisitionOptions {
    pub candidate_budget: usize,
    pub jitter_copies: usize,
    pub jitter_sigma: f64,
    pub n_mc: usize,
}

impl Default for AcquisitionOptions {
    fn default() -> Self {
        Self {
            candidate_budget: 2048,
            jitter_copies: 16,
            jitter_sigma: 0.05,
            n_mc: 512,
        }
    }
}

/// Quasi-random candidates plus Gaussian perturbations of the front's
/// configurations, all snapped to realizable configurations.
pub fn candidate_pool(
    archive: &ParetoArchive,
    domain: &SearchDomain,
    opts: &AcquisitionOptions,
    seed: u64,
) -> Vec<[f64; DIMS]> {
    let mut pool = halton_candidates(opts.candidate_budget, seed);
    let mut rng = rng::stream(derive_seed(seed, 1), Stream::Acquisition);
    for &i in archive.front() {
        let base = domain.to_unit(&archive.entries()[i].config);
        for _ in 0..opts.jitter_copies {
            pool.push(std::array::from_fn(|k| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (base[k] + opts.jitter_sigma * z).clamp(0.0, 1.0)
            }));
        }
    }
    pool.iter().map(|u| domain.snap(u)).collect()
}

/// First index of the maximum; NaN scores never win.
pub fn argmax_first(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.is_none_or(|(_, b)| s > b) && !s.is_nan() {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub config: PipelineConfig,
    pub unit: [f64; DIMS],
    pub ehvi: f64,
    /// EHVI of every pool member, in pool order.
    pub pool_scores: Vec<f64>,
    pub pool: Vec<[f64; DIMS]>,
}

/// Candidate with the largest EHVI, ties to the lowest pool index.
pub fn propose_next(
    surrogates: &SurrogateSet,
    archive: &ParetoArchive,
    domain: &SearchDomain,
    opts: &AcquisitionOptions,
    seed: u64,
    config_seed: u64,
) -> Proposal {
    let pool = candidate_pool(archive, domain, opts, seed);
    score_pool(
        surrogates,
        archive,
        domain,
        pool,
        opts.n_mc,
        seed,
        config_seed,
    )
}

/// EHVI of an explicit candidate pool and its argmax.
pub fn score_pool(
    surrogates: &SurrogateSet,
    archive: &ParetoArchive,
    domain: &SearchDomain,
    pool: Vec<[f64; DIMS]>,
    n_mc: usize,
    seed: u64,
    config_seed: u64,
) -> Proposal {
    let front = archive.front_points();
    let reference = archive.reference();
    let base = hypervolume(&front, &reference);
    let draws = normal_draws(n_mc.max(1), derive_seed(seed, 2));
    let scores: Vec<f64> = pool
        .iter()
        .map(|u| {
            let (m, v) = surrogates.predict(u);
            ehvi_from_moments(m, v, &front, base, &reference, &draws)
        })
        .collect();
    let best = argmax_first(&scores).unwrap_or(0);
    let unit = pool.get(best).copied().unwrap_or([0.5; DIMS]);
    Proposal {
        config: domain.from_unit(&unit, config_seed),
        unit,
        ehvi: scores.get(best).copied().unwrap_or(0.0),
        pool_scores: scores,
        pool,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_moments() {
        let front = [[1.0, 1.0, 1.0]];
        let r = [0.0; 3];
        let base = hypervolume(&front, &r);
        let draws = normal_draws(64, 3);
        assert_eq!(
            ehvi_from_moments([0.5, 0.5, 0.5], [0.0; 3], &front, base, &r, &draws),
            0.0
        );
        let v = ehvi_from_moments([2.0, 2.0, 2.0], [0.0; 3], &front, base, &r, &draws);
        assert!((v - 7.0).abs() < 1e-12);
    }

    #[test]
    fn halton_in_cube_and_seeded() {
        let a = halton_candidates(100, 1);
        assert_eq!(a, halton_candidates(100, 1));
        assert_ne!(a, halton_candidates(100, 2));
        assert!(a.iter().flatten().all(|v| (0.0..1.0).contains(v)));
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(5, 3), 2.0 / 3.0 + 1.0 / 9.0);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(argmax_first(&[0.0, 0.0, 0.0]), Some(0));
        assert_eq!(argmax_first(&[0.0, 2.0, 2.0]), Some(1));
        assert_eq!(argmax_first(&[]), None);
    }
}
