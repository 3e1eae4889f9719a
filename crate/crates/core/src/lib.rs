//! Discovery of utility / fairness / privacy trade-offs for small binary
//! classifiers.
//!
//! The crate is organised as a pipeline of independent stages:
//!
//! - [`data`]: Adult census ingestion, synthetic biased datasets, splits.
//! - [`fairness`]: group-fairness metrics, disparate impact remover
//!   (preprocessing) and reject option classification (postprocessing).
//! - [`privacy`]: DP-SGD primitives and a Rényi-DP accountant.
//! - [`model`]: dense feed-forward classifiers with per-sample gradients.
//! - [`pipeline`]: composition of the stages into a black-box objective
//!   `config -> (accuracy, |SPD|, epsilon)`.
//! - [`mobo`]: Pareto archive, exact hypervolume, Gaussian-process surrogates,
//!   expected hypervolume improvement, and the search drivers.
//! - [`cli`]: command implementations and on-disk artifact formats.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod fairness;
pub mod linalg;
pub mod mobo;
pub mod model;
pub mod pipeline;
pub mod privacy;
pub mod rng;

pub use data::{Dataset, SplitSpec, SyntheticSpec};
pub use fairness::{FairnessReport, RocParams};
pub use mobo::{ParetoArchive, SearchDomain};
pub use pipeline::{ObjectiveTriple, PipelineConfig};
pub use privacy::{DpParams, PrivacySpend};
