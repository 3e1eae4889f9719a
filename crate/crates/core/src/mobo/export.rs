//! CSV artifacts: the evaluated configurations with front membership, the
//! hypervolume trace and 2-D projections of the front.

use super::archive::ParetoArchive;
use super::domain::FIELD_NAMES;
use super::pareto::pareto_filter;
use std::io::{Read, Write};

pub const FRONT_HEADER: [&str; 13] = [
    "repair_level",
    "noise_multiplier",
    "clipping_norm",
    "epochs",
    "learning_rate",
    "batch_size",
    "accuracy",
    "spd",
    "epsilon",
    "t_utility",
    "t_fairness",
    "t_privacy",
    "on_front",
];

/// One row per evaluation in evaluation order.
pub fn write_front_csv<W: Write>(archive: &ParetoArchive, out: W) -> csv::Result<()> {
    debug_assert_eq!(&FRONT_HEADER[..6], &FIELD_NAMES[..]);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FRONT_HEADER)?;
    let front = archive.front();
    for (i, e) in archive.entries().iter().enumerate() {
        let c = &e.config;
        let o = &e.objectives;
        w.write_record([
            c.repair_level.to_string(),
            c.noise_multiplier.to_string(),
            c.clipping_norm.to_string(),
            c.epochs.to_string(),
            c.learning_rate.to_string(),
            c.batch_size.to_string(),
            o.accuracy.to_string(),
            o.spd.to_string(),
            o.epsilon.to_string(),
            o.transformed[0].to_string(),
            o.transformed[1].to_string(),
            o.transformed[2].to_string(),
            u8::from(front.binary_search(&i).is_ok()).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontRow {
    pub repair_level: f64,
    pub noise_multiplier: f64,
    pub clipping_norm: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub accuracy: f64,
    pub spd: f64,
    pub epsilon: f64,
    pub transformed: [f64; 3],
    pub on_front: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Field { row: usize, message: String },
}

pub fn read_front_csv<R: Read>(input: R) -> Result<Vec<FrontRow>, ExportError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != FRONT_HEADER {
        return Err(ExportError::Field {
            row: 0,
            message: "unexpected header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let f = |k: usize| -> Result<f64, ExportError> {
            rec[k].parse::<f64>().map_err(|e| ExportError::Field {
                row,
                message: format!("{}: {e}", FRONT_HEADER[k]),
            })
        };
        let u = |k: usize| -> Result<usize, ExportError> {
            rec[k].parse::<usize>().map_err(|e| ExportError::Field {
                row,
                message: format!("{}: {e}", FRONT_HEADER[k]),
            })
        };
        out.push(FrontRow {
            repair_level: f(0)?,
            noise_multiplier: f(1)?,
            clipping_norm: f(2)?,
            epochs: u(3)?,
            learning_rate: f(4)?,
            batch_size: u(5)?,
            accuracy: f(6)?,
            spd: f(7)?,
            epsilon: f(8)?,
            transformed: [f(9)?, f(10)?, f(11)?],
            on_front: u(12)? == 1,
        });
    }
    Ok(out)
}

/// Front membership recomputed from the transformed columns.
pub fn recompute_on_front(rows: &[FrontRow]) -> Vec<bool> {
    let pts: Vec<[f64; 3]> = rows.iter().map(|r| r.transformed).collect();
    let front = pareto_filter(&pts);
    (0..rows.len())
        .map(|i| front.binary_search(&i).is_ok())
        .collect()
}

/// One hypervolume trace of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct HvTrace {
    pub method: String,
    pub seed: u64,
    pub values: Vec<f64>,
}

pub const TRACE_HEADER: [&str; 4] = ["iteration", "hypervolume", "method", "seed"];

/// Iterations count from 1.
pub fn write_hv_trace_csv<W: Write>(traces: &[HvTrace], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for t in traces {
        for (i, v) in t.values.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                v.to_string(),
                t.method.clone(),
                t.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_hv_trace_csv<R: Read>(input: R) -> Result<Vec<HvTrace>, ExportError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out: Vec<HvTrace> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |m: String| ExportError::Field {
            row: i + 1,
            message: m,
        };
        let v: f64 = rec[1]
            .parse()
            .map_err(|e| bad(format!("hypervolume: {e}")))?;
        let seed: u64 = rec[3].parse().map_err(|e| bad(format!("seed: {e}")))?;
        let method = rec[2].to_string();
        match out.last_mut() {
            Some(t) if t.method == method && t.seed == seed => t.values.push(v),
            _ => out.push(HvTrace {
                method,
                seed,
                values: vec![v],
            }),
        }
    }
    Ok(out)
}

/// Cross-section file stem and the two raw objectives it projects:
/// `uv` utility vs privacy, `uf` utility vs fairness, `fp` fairness vs privacy.
pub const CROSS_SECTIONS: [(&str, [&str; 2]); 3] = [
    ("uv", ["accuracy", "epsilon"]),
    ("uf", ["accuracy", "spd"]),
    ("fp", ["spd", "epsilon"]),
];

/// Front points projected onto one pair of objectives, with the index of
/// the evaluation they come from.
pub fn write_cross_section<W: Write>(
    archive: &ParetoArchive,
    pair: [&str; 2],
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["evaluation", pair[0], pair[1]])?;
    let pick = |o: &crate::pipeline::ObjectiveTriple, name: &str| match name {
        "accuracy" => o.accuracy,
        "spd" => o.spd,
        _ => o.epsilon,
    };
    for &i in archive.front() {
        let o = &archive.entries()[i].objectives;
        w.write_record([
            i.to_string(),
            pick(o, pair[0]).to_string(),
            pick(o, pair[1]).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
