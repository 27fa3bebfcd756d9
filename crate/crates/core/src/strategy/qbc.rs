use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{select_best, unlabeled_or_exhausted, vote_entropy, QueryStrategy, ScoredCandidate};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{Classifier, Model, ModelSpec};
use crate::pool::{ClassId, EntryId, Pool, UpdateFeed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QbcConfig {
    pub committee_size: usize,
    pub model: ModelSpec,
    pub seed: u64,
    /// Bootstrap redraws per member before falling back to the full labeled set.
    pub max_redraws: usize,
}

impl Default for QbcConfig {
    fn default() -> Self {
        Self {
            committee_size: 4,
            model: ModelSpec::default(),
            seed: 0,
            max_redraws: 50,
        }
    }
}

/// Query-by-committee with bootstrap-resampled members and vote entropy.
#[derive(Debug)]
pub struct QueryByCommittee {
    feed: UpdateFeed,
    config: QbcConfig,
    rng: ChaCha8Rng,
    members: Vec<Classifier>,
    /// Which members were trained on the full labeled set after running out of redraws.
    fell_back: Vec<bool>,
    stale: bool,
}

impl QueryByCommittee {
    pub fn new(pool: &mut Pool, config: QbcConfig) -> Result<Self> {
        if config.committee_size == 0 {
            return Err(Error::Config("committee size must be positive".into()));
        }
        Ok(Self {
            feed: pool.subscribe(),
            config,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            members: Vec::new(),
            fell_back: Vec::new(),
            stale: true,
        })
    }

    pub fn members(&self) -> &[Classifier] {
        &self.members
    }

    pub fn fell_back(&self) -> &[bool] {
        &self.fell_back
    }

    /// Retrains every member on a fresh bootstrap sample of the labeled view.
    pub fn refresh_committee(&mut self, pool: &Pool) -> Result<()> {
        self.feed.check(pool)?;
        self.feed.drain();
        let (x, y) = pool.labeled_data();
        if distinct(&y) < 2 {
            return Err(Error::DegenerateLabels);
        }
        let n = y.len();
        let mut members = Vec::with_capacity(self.config.committee_size);
        let mut fell_back = Vec::with_capacity(self.config.committee_size);
        for m in 0..self.config.committee_size {
            let mut sample = None;
            for _ in 0..self.config.max_redraws {
                let idx: Vec<usize> = (0..n).map(|_| self.rng.gen_range(0..n)).collect();
                let labels: Vec<ClassId> = idx.iter().map(|&i| y[i]).collect();
                if distinct(&labels) >= 2 {
                    sample = Some((x.select_rows(&idx), labels));
                    break;
                }
            }
            let mut model = self.config.model.with_seed(self.config.seed.wrapping_add(m as u64)).build();
            match &sample {
                Some((sx, sy)) => model.fit(sx, sy)?,
                None => model.fit(&x, &y)?,
            }
            fell_back.push(sample.is_none());
            members.push(model);
        }
        self.members = members;
        self.fell_back = fell_back;
        self.stale = false;
        Ok(())
    }

    /// Each member's predictions over `x`, one vector per member.
    pub fn committee_votes(&self, x: &Matrix) -> Result<Vec<Vec<ClassId>>> {
        self.members.iter().map(|m| m.predict(x)).collect()
    }

    pub fn score_candidates(&mut self, pool: &Pool) -> Result<Vec<ScoredCandidate>> {
        let ids = unlabeled_or_exhausted(&self.feed, pool)?;
        if self.stale || self.feed.has_pending() {
            self.refresh_committee(pool)?;
        }
        let votes = self.committee_votes(&pool.feature_matrix().select_rows(&ids))?;
        Ok(ids
            .iter()
            .enumerate()
            .map(|(row, &entry_id)| {
                let column: Vec<ClassId> = votes.iter().map(|v| v[row]).collect();
                ScoredCandidate {
                    entry_id,
                    score: vote_entropy(&column),
                }
            })
            .collect())
    }
}

fn distinct(y: &[ClassId]) -> usize {
    let mut v = y.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

impl QueryStrategy for QueryByCommittee {
    fn name(&self) -> &str {
        "qbc"
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
