//! Multi-objective search over pipeline configurations: Pareto archive,
//! exact hypervolume, Gaussian-process surrogates with Monte-Carlo expected
//! hypervolume improvement, and random / grid baselines.

mod acquisition;
mod archive;
mod domain;
mod export;
mod gp;
mod pareto;
mod search;

pub use acquisition::{
    argmax_first, candidate_pool, ehvi, ehvi_from_moments, halton_candidates, normal_draws,
    propose_next, score_pool, AcquisitionOptions, Proposal, SurrogateSet,
};
pub use archive::{default_reference, ArchiveEntry, ParetoArchive};
pub use domain::{SearchDomain, DIMS, FIELD_NAMES};
pub use export::{
    read_front_csv, read_hv_trace_csv, recompute_on_front, write_cross_section, write_front_csv,
    write_hv_trace_csv, ExportError, FrontRow, HvTrace, CROSS_SECTIONS, FRONT_HEADER, TRACE_HEADER,
};
pub use gp::{
    log_marginal_likelihood, matern52, Gp, GpFitOptions, GpHyper, LENGTHSCALE_BOUNDS,
    NOISE_VAR_BOUNDS, SIGNAL_VAR_BOUNDS,
};
pub use pareto::{dominates, hypervolume, hypervolume_improvement, pareto_filter};
pub use search::{run_grid_search, run_mobo, run_random_search, EvalOutcome, Method, MoboSettings};

use crate::pipeline::PipelineError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MoboError {
    #[error("surrogate: {0}")]
    Surrogate(String),
    #[error("invalid search settings: {0}")]
    Settings(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

pub type Result<T> = std::result::Result<T, MoboError>;
