//! Simulated active learning experiments: many (strategy, trial) runs against an ideal oracle.

use std::path::PathBuf;

use active_core::{
    min_max_scale, seed_pool, split, AlblSnapshot, IdealLabeler, Labeler, Model, RawDataset,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::spec::{ModelKind, StrategySpec};

pub const DEFAULT_TEST_FRACTION: f64 = 0.33;
pub const DEFAULT_N_LABELED: usize = 10;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub data: PathBuf,
    pub strategies: Vec<StrategySpec>,
    pub model: ModelKind,
    pub quota: usize,
    pub trials: usize,
    pub test_fraction: f64,
    pub n_labeled: usize,
    pub seed: u64,
    pub scale: bool,
}

impl ExperimentConfig {
    pub fn new(data: impl Into<PathBuf>, strategies: Vec<StrategySpec>) -> Self {
        Self {
            data: data.into(),
            strategies,
            model: ModelKind::Logreg,
            quota: 10,
            trials: 1,
            test_fraction: DEFAULT_TEST_FRACTION,
            n_labeled: DEFAULT_N_LABELED,
            seed: 0,
            scale: false,
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }

    /// Checks the parts of the configuration that depend on the dataset size.
    pub fn validate(&self, data: &RawDataset) -> Result<(), HarnessError> {
        let invalid = |msg: String| Err(HarnessError::Config(msg));
        if self.strategies.is_empty() {
            return invalid("no strategies given".into());
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return invalid(format!("test fraction {} outside (0, 1)", self.test_fraction));
        }
        let n_test = (data.len() as f64 * self.test_fraction).round() as usize;
        let n_train = data.len().saturating_sub(n_test);
        if self.n_labeled < 2 || self.n_labeled > n_train {
            return invalid(format!("n-labeled {} must be in [2, {n_train}]", self.n_labeled));
        }
        let unlabeled = n_train - self.n_labeled;
        if self.quota > unlabeled {
            return invalid(format!("quota {} exceeds the {unlabeled} unlabeled training entries", self.quota));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("strategy {strategy}, trial {trial}: {source}")]
    Trial {
        strategy: String,
        trial: usize,
        #[source]
        source: active_core::Error,
    },
}

/// Test error after the initial training (index 0) and after each query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningCurve {
    pub strategy: String,
    pub trial: usize,
    pub error_rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub curve: LearningCurve,
    /// ALBL state before the first query and after every update; empty for other strategies.
    pub albl: Vec<AlblSnapshot>,
}

/// Runs one trial of the query, label, update, retrain loop.
pub fn run_trial(
    config: &ExperimentConfig,
    data: &RawDataset,
    strategy: &StrategySpec,
    trial: usize,
) -> Result<TrialOutcome, HarnessError> {
    let name = strategy.to_string();
    let attach = |source| HarnessError::Trial { strategy: name.clone(), trial, source };
    let seed = config.trial_seed(trial);

    let (mut train, mut test) = split(data, config.test_fraction, seed).map_err(attach)?;
    if config.scale {
        min_max_scale(&mut train, &mut test);
    }
    let seeded = seed_pool(&train, config.n_labeled, seed).map_err(attach)?;
    let mut pool = seeded.pool;
    let mut labeler = IdealLabeler::new(seeded.truth);
    let model_spec = config.model.spec(seed);
    let mut qs = strategy.build(&mut pool, model_spec, seed).map_err(attach)?;
    let mut model = model_spec.build();

    let mut error_rates = Vec::with_capacity(config.quota + 1);
    let mut albl = Vec::new();
    let mut record = |model: &dyn Model, qs: &dyn active_core::QueryStrategy| -> Result<(), active_core::Error> {
        let score = model.score(&test.features, &test.labels)?;
        error_rates.push((1.0 - score).clamp(0.0, 1.0));
        albl.extend(qs.snapshot());
        Ok(())
    };

    model.train(&pool).map_err(attach)?;
    record(&model, qs.as_ref()).map_err(attach)?;
    for _ in 0..config.quota {
        let id = qs.make_query(&pool).map_err(attach)?;
        let features = pool.features(id).map_err(attach)?.to_vec();
        let label = labeler.label(id, &features).map_err(attach)?;
        pool.update(id, label).map_err(attach)?;
        qs.sync(&pool).map_err(attach)?;
        model.train(&pool).map_err(attach)?;
        record(&model, qs.as_ref()).map_err(attach)?;
    }

    Ok(TrialOutcome {
        curve: LearningCurve { strategy: name, trial, error_rates },
        albl,
    })
}

/// All completed trials of an experiment, possibly cut short by a failure.
#[derive(Debug, Clone)]
pub struct RunResults {
    /// Outcomes in (strategy, trial) order; `None` where the trial failed.
    pub outcomes: Vec<Option<TrialOutcome>>,
    /// First failure in (strategy, trial) order.
    pub failure: Option<String>,
}

impl RunResults {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }

    pub fn curves(&self) -> impl Iterator<Item = &LearningCurve> {
        self.outcomes.iter().flatten().map(|o| &o.curve)
    }
}

/// Runs every (strategy, trial) pair, trials in parallel, results in deterministic order.
pub fn run_experiment(config: &ExperimentConfig, data: &RawDataset) -> Result<RunResults, HarnessError> {
    config.validate(data)?;
    let jobs: Vec<(&StrategySpec, usize)> = config
        .strategies
        .iter()
        .flat_map(|s| (0..config.trials).map(move |t| (s, t)))
        .collect();
    let results: Vec<Result<TrialOutcome, HarnessError>> = jobs
        .par_iter()
        .map(|&(spec, trial)| run_trial(config, data, spec, trial))
        .collect();
    let mut failure = None;
    let outcomes = results
        .into_iter()
        .map(|r| match r {
            Ok(o) => Some(o),
            Err(e) => {
                failure.get_or_insert_with(|| e.to_string());
                None
            }
        })
        .collect();
    Ok(RunResults { outcomes, failure })
}

/// Pointwise mean over equally long curves; empty when there are none.
pub fn mean_curve<'a>(curves: impl IntoIterator<Item = &'a LearningCurve>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for c in curves {
        if sum.is_empty() {
            sum = vec![0.0; c.error_rates.len()];
        }
        for (s, v) in sum.iter_mut().zip(&c.error_rates) {
            *s += v;
        }
        count += 1;
    }
    sum.iter().map(|s| s / count as f64).collect()
}
