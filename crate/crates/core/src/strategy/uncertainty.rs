use alloc::vec::Vec;

use super::{select_best, uncertainty_score, unlabeled_or_exhausted, LazyModel, QueryStrategy, ScoredCandidate};
use crate::error::Result;
use crate::model::{Model, ModelSpec};
use crate::pool::{EntryId, Pool, UpdateFeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UncertaintyMethod {
    /// `1 - max_c p_c`
    LeastConfident,
    /// `-(p(1) - p(2))` over the two largest probabilities
    SmallestMargin,
    /// `-Σ p_c ln p_c`
    #[default]
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UncertaintyConfig {
    pub model: ModelSpec,
}

/// Queries the entry the internal model is least sure about.
#[derive(Debug)]
pub struct UncertaintySampling {
    feed: UpdateFeed,
    method: UncertaintyMethod,
    model: LazyModel,
}

impl UncertaintySampling {
    pub fn new(pool: &mut Pool, method: UncertaintyMethod, config: UncertaintyConfig) -> Self {
        Self {
            feed: pool.subscribe(),
            method,
            model: LazyModel::new(&config.model),
        }
    }

    pub fn method(&self) -> UncertaintyMethod {
        self.method
    }

    /// Uncertainty of every unlabeled entry, ascending by id.
    pub fn score_candidates(&mut self, pool: &Pool) -> Result<Vec<ScoredCandidate>> {
        let ids = unlabeled_or_exhausted(&self.feed, pool)?;
        let model = self.model.refresh(&self.feed, pool)?;
        let proba = model.predict_proba(&pool.feature_matrix().select_rows(&ids))?;
        ids.iter()
            .zip(proba.iter_rows())
            .map(|(&entry_id, p)| {
                Ok(ScoredCandidate {
                    entry_id,
                    score: uncertainty_score(p, self.method)?,
                })
            })
            .collect()
    }
}

impl QueryStrategy for UncertaintySampling {
    fn name(&self) -> &str {
        match self.method {
            UncertaintyMethod::LeastConfident => "uncertainty-lc",
            UncertaintyMethod::SmallestMargin => "uncertainty-margin",
            UncertaintyMethod::Entropy => "uncertainty",
        }
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
