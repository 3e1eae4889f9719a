use super::config::PipelineConfig;
use super::evaluate::Evaluation;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawObjectives {
    pub accuracy: f64,
    pub spd: f64,
    pub epsilon: f64,
}

/// One line of a run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub config: PipelineConfig,
    pub raw_objectives: RawObjectives,
    pub transformed_objectives: [f64; 3],
    pub seed: u64,
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl From<&Evaluation> for EvalRecord {
    fn from(e: &Evaluation) -> Self {
        Self {
            config: e.config,
            raw_objectives: RawObjectives {
                accuracy: e.objectives.accuracy,
                spd: e.objectives.spd,
                epsilon: e.objectives.epsilon,
            },
            transformed_objectives: e.objectives.transformed,
            seed: e.config.seed,
            wall_time_s: e.wall_time_s,
            failure: e.failure.clone(),
        }
    }
}

/// Append one JSON object per line.
pub fn append_record<W: Write>(mut w: W, record: &EvalRecord) -> std::io::Result<()> {
    serde_json::to_writer(&mut w, record)?;
    w.write_all(b"\n")
}

pub fn read_records<R: BufRead>(r: R) -> std::io::Result<Vec<EvalRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
