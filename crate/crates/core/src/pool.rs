//! The example pool: labeled and unlabeled entries plus update observers.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Identifier of a pool entry: its position in the pool, fixed for life.
pub type EntryId = usize;
/// Class label. Class ids are small non-negative integers.
pub type ClassId = usize;

static NEXT_POOL_ID: AtomicUsize = AtomicUsize::new(0);

/// Emitted once per successful [`Pool::update`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateEvent {
    pub entry_id: EntryId,
    pub label: ClassId,
}

type Callback = Box<dyn FnMut(&UpdateEvent) + Send>;

/// Labeled and unlabeled examples sharing one feature dimensionality.
///
/// Observers registered through [`Pool::on_update`] run in registration
/// order, once per update. Observers cannot reach the pool mutably while
/// they run, so reentrant updates are ruled out by construction.
pub struct Pool {
    id: usize,
    features: Matrix,
    labels: Vec<Option<ClassId>>,
    n_labeled: usize,
    callbacks: Vec<Callback>,
}

impl fmt::Debug for Pool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pool")
            .field("len", &self.len())
            .field("dim", &self.dim())
            .field("n_labeled", &self.n_labeled)
            .field("callbacks", &self.callbacks.len())
            .finish()
    }
}

impl Pool {
    /// Creates a pool where entry `i` is `(features[i], labels[i])`.
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<Option<ClassId>>) -> Result<Self> {
        let features = Matrix::from_rows(&features)?;
        Self::from_matrix(features, labels)
    }

    pub fn from_matrix(features: Matrix, labels: Vec<Option<ClassId>>) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::EmptyInput);
        }
        if features.cols() == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        if labels.len() != features.rows() {
            return Err(Error::Dimension {
                expected: features.rows(),
                found: labels.len(),
            });
        }
        let n_labeled = labels.iter().filter(|l| l.is_some()).count();
        Ok(Self {
            id: NEXT_POOL_ID.fetch_add(1, Ordering::Relaxed),
            features,
            labels,
            n_labeled,
            callbacks: Vec::new(),
        })
    }

    /// Process-unique identity, used by strategies to detect being handed a foreign pool.
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn n_labeled(&self) -> usize {
        self.n_labeled
    }

    pub fn n_unlabeled(&self) -> usize {
        self.len() - self.n_labeled
    }

    pub fn features(&self, id: EntryId) -> Result<&[f64]> {
        if id >= self.len() {
            return Err(Error::NotFound(id));
        }
        Ok(self.features.row(id))
    }

    pub fn label(&self, id: EntryId) -> Result<Option<ClassId>> {
        self.labels.get(id).copied().ok_or(Error::NotFound(id))
    }

    pub fn feature_matrix(&self) -> &Matrix {
        &self.features
    }

    /// Labels entry `id` and notifies every observer.
    pub fn update(&mut self, id: EntryId, label: ClassId) -> Result<()> {
        match self.labels.get(id) {
            None => return Err(Error::NotFound(id)),
            Some(Some(_)) => return Err(Error::AlreadyLabeled(id)),
            Some(None) => {}
        }
        self.labels[id] = Some(label);
        self.n_labeled += 1;
        let event = UpdateEvent {
            entry_id: id,
            label,
        };
        for cb in &mut self.callbacks {
            cb(&event);
        }
        Ok(())
    }

    /// Appends an observer. Registering the same logic twice means it runs twice.
    pub fn on_update<F>(&mut self, callback: F)
    where
        F: FnMut(&UpdateEvent) + Send + 'static,
    {
        self.callbacks.push(Box::new(callback));
    }

    /// Registers an observer that queues events for later draining.
    pub fn subscribe(&mut self) -> UpdateFeed {
        let feed = UpdateFeed {
            pool_id: self.id,
            inbox: Arc::new(spin::Mutex::new(Vec::new())),
        };
        let inbox = Arc::clone(&feed.inbox);
        self.on_update(move |ev| inbox.lock().push(*ev));
        feed
    }

    pub fn labeled_ids(&self) -> Vec<EntryId> {
        self.ids_where(true)
    }

    pub fn unlabeled_ids(&self) -> Vec<EntryId> {
        self.ids_where(false)
    }

    fn ids_where(&self, labeled: bool) -> Vec<EntryId> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_some() == labeled)
            .map(|(i, _)| i)
            .collect()
    }

    /// `(id, features, label)` for every labeled entry, ascending by id.
    pub fn labeled_view(&self) -> Vec<(EntryId, &[f64], ClassId)> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.map(|y| (i, self.features.row(i), y)))
            .collect()
    }

    /// `(id, features)` for every unlabeled entry, ascending by id.
    pub fn unlabeled_view(&self) -> Vec<(EntryId, &[f64])> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_none())
            .map(|(i, _)| (i, self.features.row(i)))
            .collect()
    }

    /// Labeled portion as a training matrix and label vector.
    pub fn labeled_data(&self) -> (Matrix, Vec<ClassId>) {
        let ids = self.labeled_ids();
        let y = ids.iter().map(|&i| self.labels[i].unwrap()).collect();
        (self.features.select_rows(&ids), y)
    }

    pub fn distinct_labels(&self) -> Vec<ClassId> {
        let mut seen: Vec<ClassId> = self.labels.iter().flatten().copied().collect();
        seen.sort_unstable();
        seen.dedup();
        seen
    }
}

/// Queue of update events delivered by a [`Pool`] observer.
///
/// Strategies hold one of these and drain it lazily, which is how they learn
/// that their internal state is stale.
#[derive(Debug, Clone)]
pub struct UpdateFeed {
    pool_id: usize,
    inbox: Arc<spin::Mutex<Vec<UpdateEvent>>>,
}

impl UpdateFeed {
    pub fn pool_id(&self) -> usize {
        self.pool_id
    }

    pub fn drain(&self) -> Vec<UpdateEvent> {
        core::mem::take(&mut *self.inbox.lock())
    }

    pub fn has_pending(&self) -> bool {
        !self.inbox.lock().is_empty()
    }

    /// Fails with [`Error::PoolMismatch`] unless `pool` is the one this feed observes.
    pub fn check(&self, pool: &Pool) -> Result<()> {
        if pool.id() == self.pool_id {
            Ok(())
        } else {
            Err(Error::PoolMismatch)
        }
    }
}
