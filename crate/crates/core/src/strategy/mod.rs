//! Query strategies.
//!
//! A strategy is bound to one [`Pool`] at construction: it subscribes to the
//! pool's update notifications and afterwards only accepts that pool in
//! [`QueryStrategy::make_query`]. Scores are oriented so that higher means
//! "query first"; the winner is the highest score, ties going to the lowest
//! entry id.

use alloc::vec::Vec;

use crate::albl::AlblSnapshot;
use crate::error::{Error, Result};
use crate::math::ln;
use crate::model::{Classifier, Model, ModelSpec};
use crate::pool::{ClassId, EntryId, Pool, UpdateFeed};

mod dwus;
mod eer;
mod qbc;
mod random;
mod uncertainty;

pub use dwus::{DensityWeighted, DwusConfig};
pub use eer::{EerConfig, ExpectedErrorReduction};
pub use qbc::{QbcConfig, QueryByCommittee};
pub use random::RandomSampling;
pub use uncertainty::{UncertaintyConfig, UncertaintyMethod, UncertaintySampling};

pub trait QueryStrategy: Send {
    fn name(&self) -> &str;

    /// Id of the unlabeled entry to query next.
    fn make_query(&mut self, pool: &Pool) -> Result<EntryId>;

    /// Applies any pending pool updates to internal state.
    ///
    /// `make_query` does this itself; calling it earlier only matters for
    /// strategies whose diagnostics depend on the latest label.
    fn sync(&mut self, pool: &Pool) -> Result<()> {
        let _ = pool;
        Ok(())
    }

    /// Bandit diagnostics, for meta-strategies that keep them.
    fn snapshot(&self) -> Option<AlblSnapshot> {
        None
    }
}

impl<S: QueryStrategy + ?Sized> QueryStrategy for alloc::boxed::Box<S> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn make_query(&mut self, pool: &Pool) -> Result<EntryId> {
        (**self).make_query(pool)
    }

    fn sync(&mut self, pool: &Pool) -> Result<()> {
        (**self).sync(pool)
    }

    fn snapshot(&self) -> Option<AlblSnapshot> {
        (**self).snapshot()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredCandidate {
    pub entry_id: EntryId,
    pub score: f64,
}

/// Highest-scoring candidate; ties (and NaN scores) resolve to the lowest id.
pub fn select_best(candidates: &[ScoredCandidate]) -> Option<EntryId> {
    let mut best: Option<ScoredCandidate> = None;
    for c in candidates {
        let score = if c.score.is_nan() {
            f64::NEG_INFINITY
        } else {
            c.score
        };
        match best {
            Some(b) if score < b.score || (score == b.score && c.entry_id > b.entry_id) => {}
            _ => {
                best = Some(ScoredCandidate {
                    entry_id: c.entry_id,
                    score,
                })
            }
        }
    }
    best.map(|c| c.entry_id)
}

/// Checks the pool binding and non-emptiness; returns the unlabeled ids.
pub(crate) fn unlabeled_or_exhausted(feed: &UpdateFeed, pool: &Pool) -> Result<Vec<EntryId>> {
    feed.check(pool)?;
    let ids = pool.unlabeled_ids();
    if ids.is_empty() {
        return Err(Error::Exhausted);
    }
    Ok(ids)
}

/// A model retrained on demand whenever the pool has changed since its last fit.
#[derive(Debug, Clone)]
pub(crate) struct LazyModel {
    model: Classifier,
    stale: bool,
}

impl LazyModel {
    pub(crate) fn new(spec: &ModelSpec) -> Self {
        Self {
            model: spec.build(),
            stale: true,
        }
    }

    /// Retrains if `feed` delivered updates or the model was never fitted.
    pub(crate) fn refresh(&mut self, feed: &UpdateFeed, pool: &Pool) -> Result<&Classifier> {
        if !feed.drain().is_empty() {
            self.stale = true;
        }
        if self.stale {
            self.model.train(pool)?;
            self.stale = false;
        }
        Ok(&self.model)
    }
}

/// Validates a probability row: finite entries in [0, 1] summing to one.
fn check_probabilities(p: &[f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if p.is_empty()
        || p.iter().any(|v| !(0.0..=1.0).contains(v))
        || (total - 1.0).abs() > 1e-6
    {
        return Err(Error::Domain(alloc::format!("invalid probability row {p:?}")));
    }
    Ok(())
}

/// Uncertainty of a probability row; larger means less certain.
pub fn uncertainty_score(p: &[f64], method: UncertaintyMethod) -> Result<f64> {
    check_probabilities(p)?;
    Ok(match method {
        UncertaintyMethod::LeastConfident => 1.0 - p.iter().copied().fold(0.0, f64::max),
        UncertaintyMethod::SmallestMargin => {
            let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &v in p {
                if v > first {
                    second = first;
                    first = v;
                } else if v > second {
                    second = v;
                }
            }
            if second == f64::NEG_INFINITY {
                second = 0.0;
            }
            -(first - second)
        }
        UncertaintyMethod::Entropy => entropy(p),
    })
}

/// Shannon entropy in nats with `0 ln 0 = 0`.
pub(crate) fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * ln(v)).sum::<f64>()
}

/// Entropy of the committee's vote distribution.
pub fn vote_entropy(votes: &[ClassId]) -> f64 {
    if votes.is_empty() {
        return 0.0;
    }
    let mut sorted = votes.to_vec();
    sorted.sort_unstable();
    let n = votes.len() as f64;
    let fractions: Vec<f64> = sorted
        .chunk_by(|a, b| a == b)
        .map(|run| run.len() as f64 / n)
        .collect();
    entropy(&fractions)
}
