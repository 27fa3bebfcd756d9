//! Command-line entry point: `run`, `label` and `serve`.

use std::ffi::OsString;
use std::io::Write as _;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::catalog::{load_dir, load_entry};
use crate::harness::{run_experiment, ExperimentConfig, HarnessError, DEFAULT_N_LABELED, DEFAULT_TEST_FRACTION};
use crate::output::{curves_csv, write_atomic, RunRecord};
use crate::service::{serve, AppState, ServiceConfig};
use crate::spec::{parse_strategy_list, ModelKind, StrategySpec};
use crate::terminal::run_label_session;

pub const EXIT_OK: u8 = 0;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "active-lab", version, about = "Pool-based active learning experiments and labeling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate active learning with an ideal oracle and record learning curves.
    Run(RunArgs),
    /// Label queried examples yourself in the terminal.
    Label(LabelArgs),
    /// Start the HTTP labeling service.
    Serve(ServeArgs),
}

/// A whole `--strategies` value; one flag carries the full comma-separated list.
#[derive(Debug, Clone)]
pub struct StrategyList(pub Vec<StrategySpec>);

fn strategy_list(s: &str) -> Result<StrategyList, String> {
    parse_strategy_list(s).map(StrategyList).map_err(|e| e.to_string())
}

fn single_strategy(s: &str) -> Result<StrategySpec, String> {
    s.parse().map_err(|e: crate::spec::SpecError| e.to_string())
}

/// Options shared by `run` and `label`.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// LIBSVM dataset file.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelKind::Logreg)]
    pub model: ModelKind,
    /// Number of oracle queries.
    #[arg(long, default_value_t = 30)]
    pub quota: usize,
    #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
    pub test_fraction: f64,
    /// Size of the initial labeled set.
    #[arg(long, default_value_t = DEFAULT_N_LABELED)]
    pub n_labeled: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Min-max scale features to [-1, 1] using training-split statistics.
    #[arg(long)]
    pub scale: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: DataArgs,
    /// Comma-separated strategies; `albl[a|b|...]` picks ALBL's candidates.
    #[arg(long, value_parser = strategy_list, default_value = "uncertainty,random,qbc,dwus,albl")]
    pub strategies: StrategyList,
    /// Trials per strategy; trial t uses seed + t.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[command(flatten)]
    pub common: DataArgs,
    #[arg(long, value_parser = single_strategy, default_value = "uncertainty")]
    pub strategy: StrategySpec,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Directory of `*.libsvm` datasets (with optional `<name>.hint.json`).
    #[arg(long, default_value = "data")]
    pub data: PathBuf,
    /// Write a JSONL event log per session into this directory.
    #[arg(long)]
    pub log_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 3600)]
    pub idle_timeout_secs: u64,
}

impl DataArgs {
    fn config(&self, strategies: Vec<StrategySpec>) -> ExperimentConfig {
        ExperimentConfig {
            data: self.data.clone(),
            strategies,
            model: self.model,
            quota: self.quota,
            trials: 1,
            test_fraction: self.test_fraction,
            n_labeled: self.n_labeled,
            seed: self.seed,
            scale: self.scale,
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn main<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Label(args) => label(args),
        Command::Serve(args) => serve_cmd(args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(msg) => Failure::Usage(msg),
            other => Failure::Runtime(other.into()),
        }
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let entry = load_entry(&args.common.data)?;
    let mut config = args.common.config(args.strategies.0);
    config.trials = args.trials;
    let results = run_experiment(&config, &entry.data)?;
    let record = RunRecord::new(&config, &entry.data, &results);
    let json = serde_json::to_vec_pretty(&record).map_err(anyhow::Error::from)?;

    if let Some(error) = &results.failure {
        let partial = args.out_json.clone().or_else(|| args.out_csv.as_deref().map(partial_path));
        if let Some(path) = partial {
            write_atomic(&path, &json).map_err(anyhow::Error::from)?;
            eprintln!("partial results flagged invalid in {}", path.display());
        }
        return Err(Failure::Runtime(anyhow::anyhow!("run aborted: {error}")));
    }

    if let Some(path) = &args.out_csv {
        write_atomic(path, curves_csv(results.curves()).as_bytes()).map_err(anyhow::Error::from)?;
    }
    if let Some(path) = &args.out_json {
        write_atomic(path, &json).map_err(anyhow::Error::from)?;
    }
    let mut out = std::io::stdout().lock();
    let width = record.strategies.iter().map(|s| s.name.len()).max().unwrap_or(8).max(8);
    let _ = writeln!(out, "{:<width$}  trials  initial   final", "strategy");
    for s in &record.strategies {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:.4}  {:.4}",
            s.name,
            s.completed_trials,
            s.mean_curve.first().copied().unwrap_or(f64::NAN),
            s.mean_final_error.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}

/// `out.csv` -> `out.partial.json`.
fn partial_path(csv: &Path) -> PathBuf {
    csv.with_extension("partial.json")
}

fn label(args: LabelArgs) -> Result<(), Failure> {
    let entry = load_entry(&args.common.data)?;
    let config = args.common.config(vec![args.strategy]);
    config.validate(&entry.data)?;
    let stdin = std::io::stdin().lock();
    let stdout = std::io::stdout().lock();
    let curve = run_label_session(&config, &entry.data, entry.hint, stdin, stdout)?;
    println!(
        "done: error {:.4} -> {:.4} after {} queries",
        curve[0],
        curve[curve.len() - 1],
        curve.len() - 1
    );
    Ok(())
}

fn serve_cmd(args: ServeArgs) -> Result<(), Failure> {
    let datasets = load_dir(&args.data)?;
    if datasets.is_empty() {
        return Err(Failure::Usage(format!("no *.libsvm files in {}", args.data.display())));
    }
    if let Some(dir) = &args.log_dir {
        std::fs::create_dir_all(dir).map_err(anyhow::Error::from)?;
    }
    let config = ServiceConfig {
        idle_timeout: Duration::from_secs(args.idle_timeout_secs),
        log_dir: args.log_dir,
        ..Default::default()
    };
    let state = AppState::new(datasets, config);
    let runtime = tokio::runtime::Runtime::new().map_err(anyhow::Error::from)?;
    runtime
        .block_on(serve(SocketAddr::new(args.host, args.port), state))
        .map_err(anyhow::Error::from)?;
    Ok(())
}
