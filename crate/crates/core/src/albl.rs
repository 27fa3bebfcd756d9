//! Active learning by learning: choosing among query strategies with an
//! expert-advice bandit.
//!
//! Each candidate strategy is an expert whose advice is a one-hot vote for
//! its own query. A round proceeds as follows:
//!
//! 1. every candidate proposes an entry;
//! 2. the query distribution over the `|U|` unlabeled entries is
//!    `q(i) = (1 - δ) Σ_j (w_j / Σw) [ξ_j = i] + δ / |U|`;
//! 3. an entry is drawn from `q` and its probability remembered.
//!
//! Once the pool reports the label, the reward model is retrained. The raw
//! reward is 1 when the retrained model classifies the queried entry
//! correctly but the model from before the query did not, and 0 otherwise.
//! The importance-weighted reward `r / q(chosen)`,
//! rescaled by `q_min = δ / |U|` into `[0, 1]`, multiplies the weight of every
//! candidate that advised the chosen entry by `exp(δ r̂ / K)`. Weights are
//! then renormalised to sum to `K`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::exp;
use crate::matrix::Matrix;
use crate::model::{Classifier, Model, ModelSpec};
use crate::pool::{ClassId, EntryId, Pool, UpdateEvent, UpdateFeed};
use crate::strategy::{unlabeled_or_exhausted, QueryStrategy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlblConfig {
    /// Exploration floor `δ` in `[0, 1]`.
    pub delta: f64,
    pub seed: u64,
    pub reward_model: ModelSpec,
}

impl Default for AlblConfig {
    fn default() -> Self {
        Self {
            delta: 0.1,
            seed: 0,
            reward_model: ModelSpec::default(),
        }
    }
}

/// Read-only view of the bandit state.
#[derive(Debug, Clone, PartialEq)]
pub struct AlblSnapshot {
    pub candidate_names: Vec<String>,
    pub weights: Vec<f64>,
    /// Rounds in which each candidate's advice was followed.
    pub selection_counts: Vec<u64>,
    /// Rounds decided by the uniform exploration component.
    pub exploration_count: u64,
    pub queries: u64,
    /// Sum of raw (unweighted) rewards.
    pub cumulative_reward: f64,
}

/// One completed bandit round.
#[derive(Debug, Clone, PartialEq)]
pub struct AlblRound {
    pub entry_id: EntryId,
    pub query_prob: f64,
    pub reward: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Pending {
    entry_id: EntryId,
    prob: f64,
    /// Reward-model prediction for the entry before its label was known.
    prior: Option<ClassId>,
    qmin: f64,
    advice: Vec<EntryId>,
}

/// Query distribution over `unlabeled` (ascending ids) given each expert's one-hot advice.
pub fn query_distribution(weights: &[f64], advice: &[EntryId], unlabeled: &[EntryId], delta: f64) -> Vec<f64> {
    let n = unlabeled.len() as f64;
    let total: f64 = weights.iter().sum();
    let mut q = vec![delta / n; unlabeled.len()];
    for (&w, a) in weights.iter().zip(advice) {
        if let Ok(pos) = unlabeled.binary_search(a) {
            q[pos] += (1.0 - delta) * w / total;
        }
    }
    q
}

pub struct Albl {
    feed: UpdateFeed,
    config: AlblConfig,
    candidates: Vec<Box<dyn QueryStrategy>>,
    weights: Vec<f64>,
    rng: ChaCha8Rng,
    reward_model: Classifier,
    pending: Option<Pending>,
    last_distribution: Vec<(EntryId, f64)>,
    selection_counts: Vec<u64>,
    exploration_count: u64,
    queries: u64,
    cumulative_reward: f64,
    rounds: Vec<AlblRound>,
}

impl core::fmt::Debug for Albl {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Albl")
            .field("candidates", &self.candidates.iter().map(|c| c.name()).collect::<Vec<_>>())
            .field("weights", &self.weights)
            .field("queries", &self.queries)
            .finish()
    }
}

impl Albl {
    /// `candidates` must already be bound to `pool`.
    pub fn new(pool: &mut Pool, candidates: Vec<Box<dyn QueryStrategy>>, config: AlblConfig) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Config("ALBL needs at least one candidate".into()));
        }
        if !(0.0..=1.0).contains(&config.delta) {
            return Err(Error::Config(alloc::format!("delta {} outside [0, 1]", config.delta)));
        }
        let k = candidates.len();
        Ok(Self {
            feed: pool.subscribe(),
            config,
            candidates,
            weights: vec![1.0; k],
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            reward_model: config.reward_model.build(),
            pending: None,
            last_distribution: Vec::new(),
            selection_counts: vec![0; k],
            exploration_count: 0,
            queries: 0,
            cumulative_reward: 0.0,
            rounds: Vec::new(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(entry_id, q)` from the most recent round.
    pub fn last_distribution(&self) -> &[(EntryId, f64)] {
        &self.last_distribution
    }

    pub fn rounds(&self) -> &[AlblRound] {
        &self.rounds
    }

    pub fn pending_query(&self) -> Option<EntryId> {
        self.pending.as_ref().map(|p| p.entry_id)
    }

    /// Applies the reward for the pending query once its label has arrived.
    ///
    /// The pool must already contain the label; `event` must name the pending entry.
    pub fn update(&mut self, pool: &Pool, event: &UpdateEvent) -> Result<()> {
        let pending = match self.pending.take() {
            Some(p) if p.entry_id == event.entry_id => p,
            Some(p) => {
                let id = p.entry_id;
                self.pending = Some(p);
                return Err(Error::Protocol(alloc::format!(
                    "update for entry {} while entry {} is pending",
                    event.entry_id,
                    id
                )));
            }
            None => {
                return Err(Error::Protocol(alloc::format!(
                    "update for entry {} without a pending query",
                    event.entry_id
                )))
            }
        };
        self.reward_model.train(pool)?;
        let after = self.predict_one(pool, event.entry_id)?;
        let gained = after == event.label && pending.prior != Some(event.label);
        let reward = if gained { 1.0 } else { 0.0 };
        self.apply_reward(&pending, event.entry_id, reward);
        self.cumulative_reward += reward;
        self.rounds.push(AlblRound {
            entry_id: event.entry_id,
            query_prob: pending.prob,
            reward,
            weights: self.weights.clone(),
        });
        Ok(())
    }

    fn predict_one(&self, pool: &Pool, id: EntryId) -> Result<ClassId> {
        let x = Matrix::from_rows(&[pool.features(id)?])?;
        Ok(self.reward_model.predict(&x)?[0])
    }

    fn apply_reward(&mut self, pending: &Pending, chosen: EntryId, reward: f64) {
        let k = self.weights.len() as f64;
        let delta = self.config.delta;
        if pending.qmin > 0.0 {
            let importance = (reward / pending.prob).min(1.0 / pending.qmin);
            let normalized = importance * pending.qmin;
            let factor = exp(delta * normalized / k);
            for (w, &a) in self.weights.iter_mut().zip(&pending.advice) {
                if a == chosen {
                    *w *= factor;
                }
            }
        }
        let total: f64 = self.weights.iter().sum();
        for w in &mut self.weights {
            *w *= k / total;
        }
    }
}

impl QueryStrategy for Albl {
    fn name(&self) -> &str {
        "albl"
    }

    fn make_query(&mut self, pool: &Pool) -> Result<EntryId> {
        self.sync(pool)?;
        let ids = unlabeled_or_exhausted(&self.feed, pool)?;
        let advice = self
            .candidates
            .iter_mut()
            .map(|c| c.make_query(pool))
            .collect::<Result<Vec<_>>>()?;
        let q = query_distribution(&self.weights, &advice, &ids, self.config.delta);

        // Two-stage draw with the same law as q: explore uniformly with
        // probability δ, otherwise follow an expert picked by weight.
        let chosen = if self.rng.gen::<f64>() < self.config.delta {
            self.exploration_count += 1;
            ids[self.rng.gen_range(0..ids.len())]
        } else {
            let total: f64 = self.weights.iter().sum();
            let mut target = self.rng.gen::<f64>() * total;
            let mut pick = self.weights.len() - 1;
            for (j, w) in self.weights.iter().enumerate() {
                if target < *w {
                    pick = j;
                    break;
                }
                target -= w;
            }
            self.selection_counts[pick] += 1;
            advice[pick]
        };
        let pos = ids.binary_search(&chosen).expect("advice is unlabeled");
        if self.reward_model.classes().is_none() {
            self.reward_model.train(pool)?;
        }
        let prior = Some(self.predict_one(pool, chosen)?);
        self.pending = Some(Pending {
            entry_id: chosen,
            prob: q[pos],
            prior,
            qmin: self.config.delta / ids.len() as f64,
            advice,
        });
        self.last_distribution = ids.into_iter().zip(q).collect();
        self.queries += 1;
        Ok(chosen)
    }

    fn sync(&mut self, pool: &Pool) -> Result<()> {
        self.feed.check(pool)?;
        for event in self.feed.drain() {
            self.update(pool, &event)?;
        }
        Ok(())
    }

    fn snapshot(&self) -> Option<AlblSnapshot> {
        Some(AlblSnapshot {
            candidate_names: self.candidates.iter().map(|c| c.name().into()).collect(),
            weights: self.weights.clone(),
            selection_counts: self.selection_counts.clone(),
            exploration_count: self.exploration_count,
            queries: self.queries,
            cumulative_reward: self.cumulative_reward,
        })
    }
}
