//! Experiment data preparation: train/test splits, initial pools, scaling.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::libsvm::RawDataset;
use crate::pool::{ClassId, Pool};

/// Seeded shuffle, then the first `round(n * test_fraction)` rows become the test set.
pub fn split(data: &RawDataset, test_fraction: f64, seed: u64) -> Result<(RawDataset, RawDataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!("test fraction {test_fraction} outside (0, 1)")));
    }
    let n = data.len();
    let n_test = libm::round(n as f64 * test_fraction) as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::Split(format!(
            "fraction {test_fraction} of {n} rows leaves an empty part"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (test, train) = order.split_at(n_test);
    Ok((data.subset(train), data.subset(test)))
}

/// A pool seeded for simulation, with the hidden ground truth kept alongside.
#[derive(Debug)]
pub struct SeededPool {
    pub pool: Pool,
    pub truth: Vec<ClassId>,
}

/// Labels a random subset of `n_labeled` rows covering at least two classes.
pub fn seed_pool(train: &RawDataset, n_labeled: usize, seed: u64) -> Result<SeededPool> {
    const MAX_ATTEMPTS: usize = 1000;
    let n = train.len();
    if n_labeled < 2 || n_labeled > n {
        return Err(Error::Seeding(format!(
            "n_labeled {n_labeled} must be in [2, {n}]"
        )));
    }
    let mut classes = train.labels.clone();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Seeding("training data has a single class".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let chosen = index::sample(&mut rng, n, n_labeled).into_vec();
        let first = train.labels[chosen[0]];
        if chosen.iter().any(|&i| train.labels[i] != first) {
            let mut labels = alloc::vec![None; n];
            for &i in &chosen {
                labels[i] = Some(train.labels[i]);
            }
            let pool = Pool::from_matrix(train.features.clone(), labels)?;
            return Ok(SeededPool {
                pool,
                truth: train.labels.clone(),
            });
        }
    }
    Err(Error::Seeding(format!(
        "no two-class subset of size {n_labeled} found in {MAX_ATTEMPTS} draws"
    )))
}

/// Per-feature affine map onto `[-1, 1]`, fitted on one dataset and applied to others.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(data: &RawDataset) -> Self {
        let d = data.dim();
        let mut lo = alloc::vec![f64::INFINITY; d];
        let mut hi = alloc::vec![f64::NEG_INFINITY; d];
        for row in data.features.iter_rows() {
            for (j, &v) in row.iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        Self { lo, hi }
    }

    /// Constant features map to 0.
    pub fn transform(&self, data: &mut RawDataset) {
        for i in 0..data.len() {
            for (j, v) in data.features.row_mut(i).iter_mut().enumerate() {
                let span = self.hi[j] - self.lo[j];
                *v = if span > 0.0 {
                    2.0 * (*v - self.lo[j]) / span - 1.0
                } else {
                    0.0
                };
            }
        }
    }
}

/// Fits the scaler on `train` and applies it to both sets.
pub fn min_max_scale(train: &mut RawDataset, test: &mut RawDataset) {
    let scaler = MinMaxScaler::fit(train);
    scaler.transform(train);
    scaler.transform(test);
}
