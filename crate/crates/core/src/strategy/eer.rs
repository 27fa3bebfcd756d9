use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{select_best, unlabeled_or_exhausted, LazyModel, QueryStrategy, ScoredCandidate};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::model::{Model, ModelSpec};
use crate::pool::{ClassId, EntryId, Pool, UpdateFeed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EerConfig {
    pub model: ModelSpec,
    /// Training epochs for the hypothetical retrainings.
    pub retrain_epochs: usize,
    /// At most this many candidates are scored per query (seeded subsample).
    pub candidate_cap: usize,
    pub seed: u64,
}

impl Default for EerConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            retrain_epochs: 100,
            candidate_cap: 200,
            seed: 0,
        }
    }
}

/// Expected error reduction under 0/1 loss.
///
/// For candidate `x` the score is `-Σ_y P(y|x) · E(x, y)` where `E` is the
/// summed `1 - max_y' P(y'|u)` over the remaining unlabeled entries, after
/// retraining with `(x, y)` added.
#[derive(Debug)]
pub struct ExpectedErrorReduction {
    feed: UpdateFeed,
    config: EerConfig,
    model: LazyModel,
    rng: ChaCha8Rng,
}

impl ExpectedErrorReduction {
    pub fn new(pool: &mut Pool, config: EerConfig) -> Self {
        Self {
            feed: pool.subscribe(),
            config,
            model: LazyModel::new(&config.model),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        }
    }

    /// Summed expected 0/1 error over `pool`'s unlabeled entries other than `candidate`,
    /// after retraining on the labeled view plus `(candidate, label)`.
    pub fn future_error(&self, pool: &Pool, candidate: EntryId, label: ClassId) -> Result<f64> {
        let (mut x, mut y) = pool.labeled_data();
        x.push_row(pool.features(candidate)?)?;
        y.push(label);
        let mut scratch = self.config.model.with_epochs(self.config.retrain_epochs).build();
        scratch.fit(&x, &y)?;
        let rest: Vec<EntryId> = pool
            .unlabeled_ids()
            .into_iter()
            .filter(|&u| u != candidate)
            .collect();
        if rest.is_empty() {
            return Ok(0.0);
        }
        let proba = scratch.predict_proba(&pool.feature_matrix().select_rows(&rest))?;
        Ok(proba
            .iter_rows()
            .map(|p| 1.0 - p.iter().copied().fold(0.0, f64::max))
            .sum())
    }

    /// Candidates scored this round (all unlabeled ids, or a seeded subsample when over the cap).
    fn candidates(&mut self, mut ids: Vec<EntryId>) -> Vec<EntryId> {
        if ids.len() > self.config.candidate_cap {
            ids.shuffle(&mut self.rng);
            ids.truncate(self.config.candidate_cap);
            ids.sort_unstable();
        }
        ids
    }

    pub fn score_candidates(&mut self, pool: &Pool) -> Result<Vec<ScoredCandidate>> {
        let ids = unlabeled_or_exhausted(&self.feed, pool)?;
        let ids = self.candidates(ids);
        let model = self.model.refresh(&self.feed, pool)?.clone();
        let classes = model.classes().expect("trained").to_vec();
        let proba: Matrix = model.predict_proba(&pool.feature_matrix().select_rows(&ids))?;
        ids.iter()
            .zip(proba.iter_rows())
            .map(|(&entry_id, p)| {
                let mut expected = 0.0;
                for (&label, &weight) in classes.iter().zip(p) {
                    expected += weight * self.future_error(pool, entry_id, label)?;
                }
                Ok(ScoredCandidate {
                    entry_id,
                    score: -expected,
                })
            })
            .collect()
    }
}

impl QueryStrategy for ExpectedErrorReduction {
    fn name(&self) -> &str {
        "eer"
    }

    fn make_query(&mut self, pool: &Pool) -> Result<EntryId> {
        let ids = unlabeled_or_exhausted(&self.feed, pool)?;
        if ids.len() == 1 {
            return Ok(ids[0]);
        }
        let scores = self.score_candidates(pool)?;
        Ok(select_best(&scores).expect("nonempty candidates"))
    }
}
