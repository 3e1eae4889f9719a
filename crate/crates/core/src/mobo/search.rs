use super::acquisition::{propose_next, AcquisitionOptions, SurrogateSet};
use super::archive::ParetoArchive;
use super::domain::SearchDomain;
use super::gp::GpFitOptions;
use super::{MoboError, Result};
use crate::pipeline::{Evaluation, ObjectiveTriple, PipelineConfig};
use crate::rng::{self, derive_seed, Stream};

/// What a search driver needs back from one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOutcome {
    pub objectives: ObjectiveTriple,
    pub failed: bool,
}

impl From<&Evaluation> for EvalOutcome {
    fn from(e: &Evaluation) -> Self {
        Self {
            objectives: e.objectives,
            failed: e.failure.is_some(),
        }
    }
}

impl From<ObjectiveTriple> for EvalOutcome {
    fn from(objectives: ObjectiveTriple) -> Self {
        Self {
            objectives,
            failed: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mobo,
    Random,
    Grid,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mobo => "mobo",
            Method::Random => "random",
            Method::Grid => "grid",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = MoboError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mobo" => Ok(Method::Mobo),
            "random" => Ok(Method::Random),
            "grid" => Ok(Method::Grid),
            _ => Err(MoboError::Settings(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MoboSettings {
    pub budget: usize,
    pub n_init: usize,
    pub acquisition: AcquisitionOptions,
    pub gp: GpFitOptions,
    pub seed: u64,
}

impl MoboSettings {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            n_init: 16,
            acquisition: AcquisitionOptions::default(),
            gp: GpFitOptions::default(),
            seed,
        }
    }
}

/// Random initial design, then fit / acquire / evaluate / update until
/// `budget` evaluations. Every evaluation uses `settings.seed` as its
/// training seed.
pub fn run_mobo<F>(
    domain: &SearchDomain,
    settings: &MoboSettings,
    mut evaluate: F,
) -> Result<ParetoArchive>
where
    F: FnMut(&PipelineConfig) -> Result<EvalOutcome>,
{
    if settings.budget == 0 {
        return Err(MoboError::Settings("budget must be at least 1".into()));
    }
    let seed = settings.seed;
    let mut archive = ParetoArchive::default();
    let mut sampler = rng::stream(seed, Stream::Search);
    let n_init = settings
        .n_init
        .clamp(2.min(settings.budget), settings.budget);
    for _ in 0..n_init {
        let config = domain.sample(&mut sampler, seed);
        let out = evaluate(&config)?;
        archive.push(config, out.objectives, out.failed);
    }
    for iter in archive.len()..settings.budget {
        let round = derive_seed(seed, iter as u64);
        let gp_opts = GpFitOptions {
            seed: round,
            ..settings.gp.clone()
        };
        let config = match SurrogateSet::fit(&archive, domain, &gp_opts) {
            Ok(s) => propose_next(&s, &archive, domain, &settings.acquisition, round, seed).config,
            // surrogate failure: fall back to a random configuration
            Err(_) => domain.sample(&mut sampler, seed),
        };
        let out = evaluate(&config)?;
        archive.push(config, out.objectives, out.failed);
    }
    Ok(archive)
}

/// `budget` draws from [`SearchDomain::sample`].
pub fn run_random_search<F>(
    domain: &SearchDomain,
    budget: usize,
    seed: u64,
    mut evaluate: F,
) -> Result<ParetoArchive>
where
    F: FnMut(&PipelineConfig) -> Result<EvalOutcome>,
{
    let mut archive = ParetoArchive::default();
    let mut sampler = rng::stream(seed, Stream::Search);
    for _ in 0..budget {
        let config = domain.sample(&mut sampler, seed);
        let out = evaluate(&config)?;
        archive.push(config, out.objectives, out.failed);
    }
    Ok(archive)
}

/// Full factorial grid with `levels` values per varied field.
pub fn run_grid_search<F>(
    domain: &SearchDomain,
    levels: usize,
    seed: u64,
    mut evaluate: F,
) -> Result<ParetoArchive>
where
    F: FnMut(&PipelineConfig) -> Result<EvalOutcome>,
{
    let mut archive = ParetoArchive::default();
    for config in domain.grid(levels, seed) {
        let out = evaluate(&config)?;
        archive.push(config, out.objectives, out.failed);
    }
    Ok(archive)
}
