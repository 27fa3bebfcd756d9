use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{unlabeled_or_exhausted, QueryStrategy};
use crate::error::Result;
use crate::pool::{EntryId, Pool, UpdateFeed};

/// Uniform choice among the unlabeled entries; the baseline.
#[derive(Debug)]
pub struct RandomSampling {
    feed: UpdateFeed,
    rng: ChaCha8Rng,
}

impl RandomSampling {
    pub fn new(pool: &mut Pool, seed: u64) -> Self {
        Self {
            feed: pool.subscribe(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl QueryStrategy for RandomSampling {
    fn name(&self) -> &str {
        "random"
    }

    fn make_query(&mut self, pool: &Pool) -> Result<EntryId> {
        let ids = unlabeled_or_exhausted(&self.feed, pool)?;
        self.feed.drain();
        Ok(ids[self.rng.gen_range(0..ids.len())])
    }
}
