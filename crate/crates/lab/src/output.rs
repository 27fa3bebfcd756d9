//! CSV and JSON renderings of a run, written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use active_core::RawDataset;
use serde::Serialize;

use crate::harness::{mean_curve, ExperimentConfig, LearningCurve, RunResults};

pub const CSV_HEADER: &str = "strategy,trial,query_index,error_rate";

/// One row per (strategy, trial, query index), six decimals, no timestamp.
pub fn curves_csv<'a>(curves: impl IntoIterator<Item = &'a LearningCurve>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in curves {
        for (i, e) in c.error_rates.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{:.6}", csv_field(&c.strategy), c.trial, i, e);
        }
    }
    out
}

/// Quotes a field when it contains a separator or quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub valid: bool,
    pub error: Option<String>,
    pub created_at: String,
    pub config: ConfigEcho,
    pub dataset: DatasetSummary,
    pub strategies: Vec<StrategySummary>,
    pub albl: Vec<AlblTrajectory>,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub data: String,
    pub strategies: Vec<String>,
    pub model: String,
    pub quota: usize,
    pub trials: usize,
    pub test_fraction: f64,
    pub n_labeled: usize,
    pub seed: u64,
    pub scale: bool,
}

#[derive(Debug, Serialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub d: usize,
    pub classes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct StrategySummary {
    pub name: String,
    pub completed_trials: usize,
    pub mean_curve: Vec<f64>,
    pub mean_final_error: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct AlblTrajectory {
    pub strategy: String,
    pub candidates: Vec<String>,
    /// Mean candidate weights over trials, before the first query and after each update.
    pub mean_weights: Vec<Vec<f64>>,
    pub trials: Vec<AlblTrial>,
}

#[derive(Debug, Serialize)]
pub struct AlblTrial {
    pub trial: usize,
    pub weights: Vec<Vec<f64>>,
    pub selection_counts: Vec<u64>,
    pub exploration_count: u64,
    pub cumulative_reward: f64,
}

impl RunRecord {
    pub fn new(config: &ExperimentConfig, data: &RawDataset, results: &RunResults) -> Self {
        let mut strategies = Vec::new();
        let mut albl = Vec::new();
        for spec in &config.strategies {
            let name = spec.to_string();
            let outcomes: Vec<_> = results.outcomes.iter().flatten().filter(|o| o.curve.strategy == name).collect();
            let mean = mean_curve(outcomes.iter().map(|o| &o.curve));
            strategies.push(StrategySummary {
                name: name.clone(),
                completed_trials: outcomes.len(),
                mean_final_error: mean.last().copied(),
                mean_curve: mean,
            });
            if spec.is_albl() && !outcomes.is_empty() {
                let trials: Vec<AlblTrial> = outcomes
                    .iter()
                    .map(|o| {
                        let last = o.albl.last().expect("albl trials record snapshots");
                        AlblTrial {
                            trial: o.curve.trial,
                            weights: o.albl.iter().map(|s| s.weights.clone()).collect(),
                            selection_counts: last.selection_counts.clone(),
                            exploration_count: last.exploration_count,
                            cumulative_reward: last.cumulative_reward,
                        }
                    })
                    .collect();
                albl.push(AlblTrajectory {
                    strategy: name,
                    candidates: outcomes[0].albl[0].candidate_names.clone(),
                    mean_weights: mean_rows(trials.iter().map(|t| &t.weights)),
                    trials,
                });
            }
        }
        RunRecord {
            valid: results.is_valid(),
            error: results.failure.clone(),
            created_at: chrono::Utc::now().to_rfc3339(),
            config: ConfigEcho {
                data: config.data.display().to_string(),
                strategies: config.strategies.iter().map(ToString::to_string).collect(),
                model: config.model.to_string(),
                quota: config.quota,
                trials: config.trials,
                test_fraction: config.test_fraction,
                n_labeled: config.n_labeled,
                seed: config.seed,
                scale: config.scale,
            },
            dataset: DatasetSummary {
                n: data.len(),
                d: data.dim(),
                classes: data.class_table.clone(),
            },
            strategies,
            albl,
        }
    }
}

/// Elementwise mean of equally shaped matrices.
fn mean_rows<'a>(mats: impl Iterator<Item = &'a Vec<Vec<f64>>>) -> Vec<Vec<f64>> {
    let mut sum: Vec<Vec<f64>> = Vec::new();
    let mut count = 0usize;
    for m in mats {
        if sum.is_empty() {
            sum = m.iter().map(|r| vec![0.0; r.len()]).collect();
        }
        for (s, r) in sum.iter_mut().zip(m) {
            for (a, b) in s.iter_mut().zip(r) {
                *a += b;
            }
        }
        count += 1;
    }
    for row in &mut sum {
        for v in row {
            *v /= count as f64;
        }
    }
    sum
}

/// Writes through a temporary file in the destination directory, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
