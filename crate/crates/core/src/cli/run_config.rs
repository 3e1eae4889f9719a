use super::{io_err, CliError, Result};
use crate::mobo::{Method, SearchDomain};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetChoice {
    /// Original train/test pair, a single original file, or the ingest cache.
    Adult { data_path: PathBuf },
    /// Biased synthetic stand-in with MEPS-like statistics.
    Synthetic {
        #[serde(default)]
        n_records: Option<usize>,
    },
}

/// Desk scale cuts epochs to [5, 20] and uses budgets 30 / 40 / 81
/// (mobo / random / grid with 3 levels); paper scale uses the full domain
/// and 250 / 300 / 256.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

/// JSON run file for `optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub dataset: DatasetChoice,
    pub method: Method,
    #[serde(default)]
    pub scale: Scale,
    /// Evaluations; defaults follow the scale. Ignored by grid search.
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub grid_levels: Option<usize>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub n_init: Option<usize>,
    #[serde(default)]
    pub candidate_budget: Option<usize>,
    #[serde(default)]
    pub n_mc: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let run: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        run.validate()?;
        Ok(run)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(io_err(path))?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad("name must be a non-empty file name");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        if self.budget == Some(0) || self.grid_levels == Some(0) || self.n_mc == Some(0) {
            return bad("budget, grid_levels and n_mc must be positive");
        }
        if self.candidate_budget == Some(0) {
            return bad("candidate_budget must be positive");
        }
        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.seeds.len() {
            return bad("seeds must be distinct");
        }
        Ok(())
    }

    pub fn domain(&self) -> SearchDomain {
        match self.scale {
            Scale::Desk => SearchDomain::desk(),
            Scale::Paper => SearchDomain::paper(),
        }
    }

    pub fn budget(&self) -> usize {
        self.budget.unwrap_or(match (self.scale, self.method) {
            (Scale::Desk, Method::Mobo) => 30,
            (Scale::Desk, Method::Random) => 40,
            (Scale::Paper, Method::Mobo) => 250,
            (Scale::Paper, Method::Random) => 300,
            (_, Method::Grid) => self.grid_levels().pow(4),
        })
    }

    pub fn grid_levels(&self) -> usize {
        self.grid_levels.unwrap_or(match self.scale {
            Scale::Desk => 3,
            Scale::Paper => 4,
        })
    }
}
