use clap::{Parser, Subcommand};
use pfairdp::cli::{
    cmd_front_query, cmd_hv_trace, cmd_ingest, cmd_optimize, cmd_replicate,
    format_replication_table, write_replication_csv, DatasetChoice, RunConfig, Scale,
};
use pfairdp::mobo::Method;
use pfairdp::pipeline::Study;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pfairdp",
    version,
    about = "Utility / fairness / privacy trade-off discovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the Adult data and write a single-CSV cache next to it.
    Ingest {
        /// Directory with adult.data / adult.test, or a single file.
        #[arg(long, default_value = "data/adult")]
        data_path: PathBuf,
        /// Fetch the original files into --data-path first.
        #[arg(long)]
        download: bool,
    },
    /// Rerun a published model set as pipeline configurations.
    Replicate {
        /// pannekoek or xu.
        #[arg(long)]
        study: String,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Seed of the first run; run r uses seed + r.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "data/adult")]
        data_path: PathBuf,
        /// CSV destination for the summary rows.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search for the Pareto front.
    Optimize {
        /// JSON run file; the flags below override or replace it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
        /// mobo, random or grid.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        seed: Vec<u64>,
        /// Adult location; omit to use the synthetic dataset.
        #[arg(long)]
        data_path: Option<PathBuf>,
        #[arg(long)]
        synthetic: bool,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Epochs in [5, 20]; budgets 30 / 40 / 81.
        #[arg(long, conflicts_with = "paper_scale")]
        desk_scale: bool,
        /// Full domains; budgets 250 / 300 / 256.
        #[arg(long)]
        paper_scale: bool,
    },
    /// List front points above an accuracy floor, by increasing epsilon.
    FrontQuery {
        #[arg(long)]
        front: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        accuracy_min: f64,
    },
    /// Merge hypervolume traces of several runs into one CSV.
    HvTrace {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Ingest {
            data_path,
            download,
        } => {
            let (n, cache) = cmd_ingest(&data_path, download)?;
            println!("{n} records; cache written to {}", cache.display());
        }
        Command::Replicate {
            study,
            runs,
            seed,
            data_path,
            output,
        } => {
            let study: Study = study.parse()?;
            if runs == 0 {
                return Err("--runs must be at least 1".into());
            }
            let rows = cmd_replicate(&data_path, study, runs, seed)?;
            print!("{}", format_replication_table(&rows));
            if let Some(path) = output {
                write_replication_csv(&rows, &path)?;
            }
        }
        Command::Optimize {
            config,
            name,
            method,
            budget,
            seed,
            data_path,
            synthetic,
            output_dir,
            desk_scale: _,
            paper_scale,
        } => {
            let mut run = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig {
                    name: name.clone().unwrap_or_else(|| "run".into()),
                    dataset: DatasetChoice::Synthetic { n_records: None },
                    method: Method::Mobo,
                    scale: Scale::Desk,
                    budget: None,
                    grid_levels: None,
                    seeds: vec![0],
                    output_dir: PathBuf::from("runs"),
                    n_init: None,
                    candidate_budget: None,
                    n_mc: None,
                },
            };
            if let Some(n) = name {
                run.name = n;
            }
            if let Some(m) = method {
                run.method = m.parse()?;
            }
            if budget.is_some() {
                run.budget = budget;
            }
            if !seed.is_empty() {
                run.seeds = seed;
            }
            if let Some(p) = data_path {
                run.dataset = DatasetChoice::Adult { data_path: p };
            } else if synthetic {
                run.dataset = DatasetChoice::Synthetic { n_records: None };
            }
            if let Some(d) = output_dir {
                run.output_dir = d;
            }
            if paper_scale {
                run.scale = Scale::Paper;
            }
            run.validate()?;
            for out in cmd_optimize(&run)? {
                println!(
                    "{}: {} evaluations, front size {}, hypervolume {}",
                    out.dir.display(),
                    out.archive.len(),
                    out.archive.front().len(),
                    out.archive.hypervolume()
                );
            }
        }
        Command::FrontQuery {
            front,
            accuracy_min,
        } => {
            let rows = cmd_front_query(&front, accuracy_min)?;
            println!("accuracy,epsilon,spd,repair_level,noise_multiplier,clipping_norm,epochs,learning_rate,batch_size");
            for r in rows {
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    r.accuracy,
                    r.epsilon,
                    r.spd,
                    r.repair_level,
                    r.noise_multiplier,
                    r.clipping_norm,
                    r.epochs,
                    r.learning_rate,
                    r.batch_size
                );
            }
        }
        Command::HvTrace { inputs, output } => {
            let traces = cmd_hv_trace(&inputs, &output)?;
            for t in traces {
                println!(
                    "{} seed {}: final hypervolume {}",
                    t.method,
                    t.seed,
                    t.values.last().copied().unwrap_or(0.0)
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
