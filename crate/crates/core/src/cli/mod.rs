//! Command implementations behind the `pfairdp` binary.
//!
//! Output layout of `optimize`: `<output_dir>/<name>/` (or
//! `<name>-s<seed>/` when several seeds are given) holding `log.jsonl`,
//! `front.csv`, `hv_trace.csv`, `xsect_uv.csv`, `xsect_uf.csv`,
//! `xsect_fp.csv` and `summary.txt`.

mod replicate;
mod run_config;

pub use replicate::{
    cmd_replicate, format_replication_table, write_replication_csv, ReplicationRow,
};
pub use run_config::{DatasetChoice, RunConfig, Scale};

use crate::data::{
    adult_label, adult_protected_sex, download_adult, generate_synthetic, load_adult, preprocess,
    write_table_csv, DataError, SplitSpec, SyntheticSpec,
};
use crate::mobo::{
    read_front_csv, read_hv_trace_csv, run_grid_search, run_mobo, run_random_search,
    write_cross_section, write_front_csv, write_hv_trace_csv, EvalOutcome, ExportError, FrontRow,
    HvTrace, Method, MoboError, MoboSettings, ParetoArchive, CROSS_SECTIONS,
};
use crate::pipeline::{append_record, evaluate_detailed, EvalRecord, PipelineError, Splits, Task};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("run config: {0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Mobo(#[from] MoboError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Name of the parsed-table cache written by [`cmd_ingest`].
pub const ADULT_CACHE: &str = "adult.csv";

/// Parse Adult from `data_path` (downloading the original files first when
/// asked) and write the single-CSV cache next to it. Returns the record
/// count and the cache path.
pub fn cmd_ingest(data_path: &Path, download: bool) -> Result<(usize, PathBuf)> {
    if download {
        download_adult(data_path)?;
    }
    let table = load_adult(data_path)?;
    let dir = if data_path.is_dir() {
        data_path.to_path_buf()
    } else {
        data_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default()
    };
    let cache = dir.join(ADULT_CACHE);
    if data_path == cache {
        return Ok((table.len(), cache));
    }
    let file = File::create(&cache).map_err(io_err(&cache))?;
    write_table_csv(&table, BufWriter::new(file))?;
    Ok((table.len(), cache))
}

/// Train/dev/test data and model settings for a Pareto experiment.
pub fn load_experiment(
    dataset: &DatasetChoice,
    postprocessing: bool,
    seed: u64,
) -> Result<(Splits, Task)> {
    match dataset {
        DatasetChoice::Adult { data_path } => {
            let raw = load_adult(data_path)?;
            let pre = preprocess(
                &raw,
                &adult_label(),
                &adult_protected_sex(),
                &SplitSpec::pareto(seed),
            )?;
            Ok((
                Splits::for_postprocessing(&pre, postprocessing)?,
                Task::adult(),
            ))
        }
        DatasetChoice::Synthetic { n_records } => {
            let mut spec = SyntheticSpec::meps_like(seed);
            if let Some(n) = n_records {
                spec.n_records = *n;
            }
            let data = generate_synthetic(&spec)?;
            let (train, dev, test) = data.split(&SplitSpec::pareto(seed))?;
            Ok((
                Splits::from_parts(train, dev, test, postprocessing)?,
                Task::meps_like(),
            ))
        }
    }
}

/// Artifacts of one optimize run.
#[derive(Debug, Clone)]
pub struct OptimizeOutput {
    pub dir: PathBuf,
    pub seed: u64,
    pub archive: ParetoArchive,
}

/// Run the configured search once per seed and write the artifacts.
pub fn cmd_optimize(run: &RunConfig) -> Result<Vec<OptimizeOutput>> {
    run.validate()?;
    let mut outputs = Vec::new();
    for &seed in &run.seeds {
        let dir = if run.seeds.len() == 1 {
            run.output_dir.join(&run.name)
        } else {
            run.output_dir.join(format!("{}-s{seed}", run.name))
        };
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let domain = run.domain();
        let (splits, task) = load_experiment(&run.dataset, domain.modules.postprocessing, seed)?;
        let log_path = dir.join("log.jsonl");
        let mut log = BufWriter::new(File::create(&log_path).map_err(io_err(&log_path))?);
        let mut log_error: Option<std::io::Error> = None;
        let mut evaluate =
            |config: &crate::pipeline::PipelineConfig| -> crate::mobo::Result<EvalOutcome> {
                let e = evaluate_detailed(config, &task, &splits)?;
                if let Err(err) = append_record(&mut log, &EvalRecord::from(&e)) {
                    log_error.get_or_insert(err);
                }
                Ok(EvalOutcome::from(&e))
            };
        let archive = match run.method {
            Method::Mobo => {
                let mut settings = MoboSettings::new(run.budget(), seed);
                if let Some(n) = run.n_init {
                    settings.n_init = n;
                }
                if let Some(c) = run.candidate_budget {
                    settings.acquisition.candidate_budget = c;
                }
                if let Some(m) = run.n_mc {
                    settings.acquisition.n_mc = m;
                }
                run_mobo(&domain, &settings, &mut evaluate)?
            }
            Method::Random => run_random_search(&domain, run.budget(), seed, &mut evaluate)?,
            Method::Grid => run_grid_search(&domain, run.grid_levels(), seed, &mut evaluate)?,
        };
        if let Some(err) = log_error {
            return Err(CliError::Io {
                path: log_path.display().to_string(),
                source: err,
            });
        }
        log.flush().map_err(io_err(&log_path))?;
        write_artifacts(&dir, &archive, run.method, seed)?;
        outputs.push(OptimizeOutput { dir, seed, archive });
    }
    Ok(outputs)
}

/// Front, trace, cross-section and summary files for one archive.
pub fn write_artifacts(
    dir: &Path,
    archive: &ParetoArchive,
    method: Method,
    seed: u64,
) -> Result<()> {
    let create = |name: &str| -> Result<BufWriter<File>> {
        let p = dir.join(name);
        Ok(BufWriter::new(File::create(&p).map_err(io_err(&p))?))
    };
    write_front_csv(archive, create("front.csv")?)?;
    let trace = HvTrace {
        method: method.as_str().to_string(),
        seed,
        values: archive.hv_trace().to_vec(),
    };
    write_hv_trace_csv(&[trace], create("hv_trace.csv")?)?;
    for (stem, pair) in CROSS_SECTIONS {
        write_cross_section(archive, pair, create(&format!("xsect_{stem}.csv"))?)?;
    }
    let summary_path = dir.join("summary.txt");
    let mut s = create("summary.txt")?;
    let failed = archive.entries().iter().filter(|e| e.failed).count();
    let body = format!(
        "method: {}\nseed: {seed}\nevaluations: {}\nfailed: {failed}\nfront size: {}\nhypervolume: {}\n",
        method.as_str(),
        archive.len(),
        archive.front().len(),
        archive.hypervolume()
    );
    s.write_all(body.as_bytes())
        .map_err(io_err(&summary_path))?;
    s.flush().map_err(io_err(&summary_path))?;
    Ok(())
}

/// Front rows with accuracy at least `accuracy_min`, by increasing epsilon.
pub fn cmd_front_query(front: &Path, accuracy_min: f64) -> Result<Vec<FrontRow>> {
    let file = File::open(front).map_err(io_err(front))?;
    let mut rows: Vec<FrontRow> = read_front_csv(file)?
        .into_iter()
        .filter(|r| r.on_front && r.accuracy >= accuracy_min)
        .collect();
    rows.sort_by(|a, b| {
        a.epsilon
            .total_cmp(&b.epsilon)
            .then(b.accuracy.total_cmp(&a.accuracy))
    });
    Ok(rows)
}

/// Concatenate the traces of several `hv_trace.csv` files into `output`.
pub fn cmd_hv_trace(inputs: &[PathBuf], output: &Path) -> Result<Vec<HvTrace>> {
    let mut all = Vec::new();
    for p in inputs {
        let file = File::open(p).map_err(io_err(p))?;
        all.extend(read_hv_trace_csv(file)?);
    }
    let file = File::create(output).map_err(io_err(output))?;
    write_hv_trace_csv(&all, BufWriter::new(file))?;
    Ok(all)
}

/// Pairs of front rows with accuracies within `max_accuracy_gap` whose
/// epsilons differ by at least `min_epsilon_ratio`.
pub fn similar_utility_pairs(
    rows: &[FrontRow],
    max_accuracy_gap: f64,
    min_epsilon_ratio: f64,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let lo = a.epsilon.min(b.epsilon);
            let hi = a.epsilon.max(b.epsilon);
            if (a.accuracy - b.accuracy).abs() < max_accuracy_gap
                && lo > 0.0
                && hi / lo >= min_epsilon_ratio
            {
                out.push((i, j));
            }
        }
    }
    out
}
