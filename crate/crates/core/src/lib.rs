//! Pool-based active learning without the standard library.
//!
//! The crate is organised around four pieces that mirror the usual active
//! learning loop:
//!
//! * [`Pool`] stores labeled and unlabeled examples and notifies observers
//!   every time an example receives a label.
//! * [`QueryStrategy`] picks the next unlabeled example to ask about.
//! * [`Model`] is a trainable classifier with label, decision-value and
//!   probability outputs.
//! * [`Labeler`] answers queries.
//!
//! ```
//! use active_core::{
//!     IdealLabeler, Labeler, LogisticRegression, Model, Pool, QueryStrategy,
//!     UncertaintyMethod, UncertaintySampling,
//! };
//!
//! let x = vec![vec![-2.0], vec![-1.0], vec![-0.1], vec![0.2], vec![1.0], vec![2.0]];
//! let truth = vec![0, 0, 0, 1, 1, 1];
//! let mut pool = Pool::new(x, vec![Some(0), None, None, None, None, Some(1)]).unwrap();
//! let mut strategy = UncertaintySampling::new(&mut pool, UncertaintyMethod::Entropy, Default::default());
//! let mut labeler = IdealLabeler::new(truth);
//! let mut model = LogisticRegression::default();
//! for _ in 0..2 {
//!     let id = strategy.make_query(&pool).unwrap();
//!     let label = labeler.label(id, pool.features(id).unwrap()).unwrap();
//!     pool.update(id, label).unwrap();
//!     model.train(&pool).unwrap();
//! }
//! assert_eq!(pool.n_labeled(), 4);
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod albl;
pub mod data;
mod error;
pub mod labeler;
pub mod libsvm;
pub mod math;
mod matrix;
pub mod model;
pub mod pool;
pub mod strategy;

pub use albl::{Albl, AlblConfig, AlblSnapshot};
pub use data::{min_max_scale, seed_pool, split, MinMaxScaler, SeededPool};
pub use error::{Error, Result};
pub use labeler::{IdealLabeler, Labeler};
pub use libsvm::{parse_libsvm, to_libsvm_string, RawDataset};
pub use matrix::Matrix;
pub use model::{
    Classifier, LinearSvm, LogisticConfig, LogisticRegression, Model, ModelSpec, SvmConfig,
};
pub use pool::{ClassId, EntryId, Pool, UpdateEvent, UpdateFeed};
pub use strategy::{
    DensityWeighted, DwusConfig, ExpectedErrorReduction, EerConfig, QueryByCommittee, QbcConfig,
    QueryStrategy, RandomSampling, ScoredCandidate, UncertaintyConfig, UncertaintyMethod,
    UncertaintySampling,
};
