use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{entropy, select_best, unlabeled_or_exhausted, LazyModel, QueryStrategy, ScoredCandidate};
use crate::error::Result;
use crate::math::{exp, median, sqrt, squared_distance};
use crate::model::{Model, ModelSpec};
use crate::pool::{EntryId, Pool, UpdateFeed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwusConfig {
    pub model: ModelSpec,
    pub seed: u64,
    /// Upper bound on the points used to estimate the kernel bandwidth.
    pub bandwidth_sample: usize,
}

impl Default for DwusConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            seed: 0,
            bandwidth_sample: 500,
        }
    }
}

/// Entropy uncertainty weighted by a Gaussian-kernel density over the unlabeled pool.
///
/// The bandwidth is the median pairwise distance of (a sample of) the
/// unlabeled points present at construction, and stays fixed afterwards.
#[derive(Debug)]
pub struct DensityWeighted {
    feed: UpdateFeed,
    model: LazyModel,
    sigma: f64,
}

/// Median pairwise Euclidean distance, or 1.0 when that is zero or undefined.
pub(crate) fn median_bandwidth(points: &[&[f64]]) -> f64 {
    let mut dists = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            dists.push(sqrt(squared_distance(a, b)));
        }
    }
    match median(&mut dists) {
        Some(m) if m > 0.0 => m,
        _ => 1.0,
    }
}

impl DensityWeighted {
    pub fn new(pool: &mut Pool, config: DwusConfig) -> Self {
        let mut ids = pool.unlabeled_ids();
        if ids.len() > config.bandwidth_sample {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            ids.shuffle(&mut rng);
            ids.truncate(config.bandwidth_sample);
            ids.sort_unstable();
        }
        let points: Vec<&[f64]> = ids.iter().map(|&i| pool.feature_matrix().row(i)).collect();
        let sigma = median_bandwidth(&points);
        Self {
            feed: pool.subscribe(),
            model: LazyModel::new(&config.model),
            sigma,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Mean kernel similarity of each unlabeled entry to all unlabeled entries (itself included).
    pub fn densities(&self, pool: &Pool) -> Vec<(EntryId, f64)> {
        let unlabeled = pool.unlabeled_view();
        let denom = 2.0 * self.sigma * self.sigma;
        unlabeled
            .iter()
            .map(|&(id, x)| {
                let total: f64 = unlabeled
                    .iter()
                    .map(|&(_, u)| exp(-squared_distance(x, u) / denom))
                    .sum();
                (id, total / unlabeled.len() as f64)
            })
            .collect()
    }

    pub fn score_candidates(&mut self, pool: &Pool) -> Result<Vec<ScoredCandidate>> {
        let ids = unlabeled_or_exhausted(&self.feed, pool)?;
        let model = self.model.refresh(&self.feed, pool)?;
        let proba = model.predict_proba(&pool.feature_matrix().select_rows(&ids))?;
        let densities = self.densities(pool);
        Ok(densities
            .into_iter()
            .zip(proba.iter_rows())
            .map(|((entry_id, density), p)| ScoredCandidate {
                entry_id,
                score: entropy(p) * density,
            })
            .collect())
    }
}

impl QueryStrategy for DensityWeighted {
    fn name(&self) -> &str {
        "dwus"
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
