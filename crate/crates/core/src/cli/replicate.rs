use super::{io_err, Result};
use crate::data::{adult_label, adult_protected_sex, load_adult, preprocess, SplitSpec};
use crate::pipeline::{evaluate_detailed, study_presets, Splits, Study, Task};
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

/// Mean and sample standard deviation over the runs of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow {
    pub model: String,
    pub epsilon: Option<f64>,
    pub runs: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub risk_difference_mean: f64,
    pub risk_difference_std: f64,
    /// Mean reported epsilon of the private models.
    pub reported_epsilon: Option<f64>,
    pub accuracies: Vec<f64>,
    pub risk_differences: Vec<f64>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Evaluate every preset of `study` for `runs` seeds starting at
/// `base_seed`. Run `r` uses seed `base_seed + r` for both the split and
/// training, shared by all presets.
pub fn cmd_replicate(
    data_path: &Path,
    study: Study,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<ReplicationRow>> {
    let raw = load_adult(data_path)?;
    let presets = study_presets(study);
    let task = Task::adult();
    let mut acc = vec![Vec::new(); presets.len()];
    let mut rd = vec![Vec::new(); presets.len()];
    let mut eps = vec![Vec::new(); presets.len()];
    for r in 0..runs {
        let seed = base_seed + r as u64;
        let pre = preprocess(
            &raw,
            &adult_label(),
            &adult_protected_sex(),
            &SplitSpec::replication(seed),
        )?;
        let splits = Splits::new(pre.train, pre.dev, pre.test);
        for (k, p) in presets.iter().enumerate() {
            let e = evaluate_detailed(&p.config.with_seed(seed), &task, &splits)?;
            acc[k].push(e.objectives.accuracy);
            rd[k].push(e.objectives.spd);
            if e.config.modules.dp_enabled() {
                eps[k].push(e.objectives.epsilon);
            }
        }
    }
    Ok(presets
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (am, asd) = mean_std(&acc[k]);
            let (rm, rsd) = mean_std(&rd[k]);
            ReplicationRow {
                model: p.model.to_string(),
                epsilon: p.epsilon,
                runs,
                accuracy_mean: am,
                accuracy_std: asd,
                risk_difference_mean: rm,
                risk_difference_std: rsd,
                reported_epsilon: (!eps[k].is_empty()).then(|| mean_std(&eps[k]).0),
                accuracies: acc[k].clone(),
                risk_differences: rd[k].clone(),
            }
        })
        .collect())
}

pub fn write_replication_csv(rows: &[ReplicationRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record([
        "model",
        "epsilon",
        "runs",
        "accuracy_mean",
        "accuracy_std",
        "risk_difference_mean",
        "risk_difference_std",
        "reported_epsilon",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.model.clone(),
            opt(r.epsilon),
            r.runs.to_string(),
            r.accuracy_mean.to_string(),
            r.accuracy_std.to_string(),
            r.risk_difference_mean.to_string(),
            r.risk_difference_std.to_string(),
            opt(r.reported_epsilon),
        ])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn format_replication_table(rows: &[ReplicationRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<8} {:>6} {:>18} {:>20} {:>10}",
        "model", "eps", "accuracy", "risk difference", "reported"
    );
    for r in rows {
        let eps = r
            .epsilon
            .map(|e| format!("{e}"))
            .unwrap_or_else(|| "-".into());
        let rep = r
            .reported_epsilon
            .map(|e| format!("{e:.4}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<8} {:>6} {:>8.4} ± {:<7.4} {:>9.4} ± {:<8.4} {:>10}",
            r.model,
            eps,
            r.accuracy_mean,
            r.accuracy_std,
            r.risk_difference_mean,
            r.risk_difference_std,
            rep
        );
    }
    s
}
