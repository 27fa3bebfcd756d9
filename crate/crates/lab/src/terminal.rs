//! Human oracle on a text terminal, and the interactive session built around it.

use std::io::{BufRead, Write};

use active_core::{min_max_scale, seed_pool, split, ClassId, EntryId, Error, Labeler, Model};

use crate::catalog::DisplayHint;
use crate::harness::ExperimentConfig;
use crate::spec::StrategySpec;

/// Shows each queried example and reads label tokens until a valid one arrives.
pub struct TerminalLabeler<R, W> {
    input: R,
    output: W,
    tokens: Vec<String>,
    hint: DisplayHint,
}

impl<R: BufRead, W: Write> TerminalLabeler<R, W> {
    pub fn new(input: R, output: W, tokens: Vec<String>, hint: DisplayHint) -> Self {
        Self { input, output, tokens, hint }
    }

    pub fn output(&mut self) -> &mut W {
        &mut self.output
    }

    fn prompt(&mut self) -> std::io::Result<Option<String>> {
        write!(self.output, "label [{}]: ", self.tokens.join("/"))?;
        self.output.flush()?;
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        Ok(Some(line.trim().to_string()))
    }
}

fn aborted(e: impl std::fmt::Display) -> Error {
    Error::Aborted(e.to_string())
}

impl<R: BufRead, W: Write> Labeler for TerminalLabeler<R, W> {
    fn label(&mut self, entry_id: EntryId, features: &[f64]) -> active_core::Result<ClassId> {
        let shown = self.hint.render(features);
        write!(self.output, "\nexample {entry_id}\n{shown}").map_err(aborted)?;
        loop {
            match self.prompt().map_err(aborted)? {
                None => return Err(Error::Aborted("input closed".into())),
                Some(token) => match self.tokens.iter().position(|t| *t == token) {
                    Some(class) => return Ok(class),
                    None => writeln!(self.output, "`{token}` is not one of {}", self.tokens.join(", "))
                        .map_err(aborted)?,
                },
            }
        }
    }
}

/// Runs `config.quota` rounds with a human oracle; returns the test error curve.
///
/// Only `config.strategies[0]` and the first trial's seed are used.
pub fn run_label_session<R: BufRead, W: Write>(
    config: &ExperimentConfig,
    data: &active_core::RawDataset,
    hint: DisplayHint,
    input: R,
    output: W,
) -> anyhow::Result<Vec<f64>> {
    config.validate(data)?;
    let spec: &StrategySpec = &config.strategies[0];
    let seed = config.seed;
    let (raw_train, mut test) = split(data, config.test_fraction, seed)?;
    let mut train = raw_train.clone();
    if config.scale {
        min_max_scale(&mut train, &mut test);
    }
    let mut pool = seed_pool(&train, config.n_labeled, seed)?.pool;
    let model_spec = config.model.spec(seed);
    let mut strategy = spec.build(&mut pool, model_spec, seed)?;
    let mut model = model_spec.build();
    let mut labeler = TerminalLabeler::new(input, output, data.class_table.clone(), hint);

    model.train(&pool)?;
    let mut curve = vec![1.0 - model.score(&test.features, &test.labels)?];
    writeln!(labeler.output(), "strategy {spec}, quota {}, initial error {:.4}", config.quota, curve[0])?;
    for round in 1..=config.quota {
        let id = strategy.make_query(&pool)?;
        let label = labeler.label(id, raw_train.features.row(id))?;
        pool.update(id, label)?;
        strategy.sync(&pool)?;
        model.train(&pool)?;
        let err = 1.0 - model.score(&test.features, &test.labels)?;
        curve.push(err);
        writeln!(labeler.output(), "query {round}/{}: error {err:.4}", config.quota)?;
    }
    Ok(curve)
}
