//! Oracles that answer label queries.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pool::{ClassId, EntryId};

pub trait Labeler {
    /// Label for the queried entry. Interactive labelers only look at `features`.
    fn label(&mut self, entry_id: EntryId, features: &[f64]) -> Result<ClassId>;
}

/// Simulated oracle backed by the full ground truth.
#[derive(Debug, Clone)]
pub struct IdealLabeler {
    truth: Vec<ClassId>,
}

impl IdealLabeler {
    pub fn new(truth: Vec<ClassId>) -> Self {
        Self { truth }
    }

    pub fn lookup(&self, entry_id: EntryId) -> Result<ClassId> {
        self.truth.get(entry_id).copied().ok_or(Error::NotFound(entry_id))
    }
}

impl Labeler for IdealLabeler {
    fn label(&mut self, entry_id: EntryId, _features: &[f64]) -> Result<ClassId> {
        self.lookup(entry_id)
    }
}
