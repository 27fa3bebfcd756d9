//! Trainable classifiers.
//!
//! Every model exposes three views of its output:
//!
//! * [`Model::predict`]: one class id per row.
//! * [`Model::predict_real`]: raw per-class decision values. Binary models
//!   return `(-f(x), f(x))` so binary and multi-class outputs share a shape.
//! * [`Model::predict_proba`]: per-class probabilities, rows summing to one.
//!
//! Columns of the real-valued outputs follow [`Model::classes`], which is
//! sorted ascending. Predictions take the argmax over decision values with
//! ties going to the lowest class id.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::argmax;
use crate::matrix::Matrix;
use crate::pool::{ClassId, Pool};

mod logistic;
mod svm;

pub use logistic::{LogisticConfig, LogisticObjective, LogisticRegression};
pub use svm::{LinearSvm, SvmConfig};

pub trait Model: Send {
    /// Fits on `x` with labels `y`. At least two distinct classes are required.
    fn fit(&mut self, x: &Matrix, y: &[ClassId]) -> Result<()>;

    /// Fits on exactly the labeled portion of `pool`.
    fn train(&mut self, pool: &Pool) -> Result<()> {
        let (x, y) = pool.labeled_data();
        self.fit(&x, &y)
    }

    /// Classes seen during training, ascending. `None` before training.
    fn classes(&self) -> Option<&[ClassId]>;

    fn predict_real(&self, x: &Matrix) -> Result<Matrix>;

    fn predict_proba(&self, x: &Matrix) -> Result<Matrix>;

    fn predict(&self, x: &Matrix) -> Result<Vec<ClassId>> {
        let real = self.predict_real(x)?;
        let classes = self.classes().ok_or(Error::Untrained)?;
        Ok(real
            .iter_rows()
            .map(|row| classes[argmax(row).unwrap_or(0)])
            .collect())
    }

    /// Fraction of rows predicted correctly.
    fn score(&self, x: &Matrix, y: &[ClassId]) -> Result<f64> {
        if y.is_empty() {
            return Err(Error::EmptyInput);
        }
        if x.rows() != y.len() {
            return Err(Error::Dimension {
                expected: x.rows(),
                found: y.len(),
            });
        }
        let pred = self.predict(x)?;
        let correct = pred.iter().zip(y).filter(|(p, t)| p == t).count();
        Ok(correct as f64 / y.len() as f64)
    }
}

/// Sorted distinct classes of `y` and each label's position among them.
pub(crate) fn index_classes(x: &Matrix, y: &[ClassId]) -> Result<(Vec<ClassId>, Vec<usize>)> {
    if x.rows() != y.len() {
        return Err(Error::Dimension {
            expected: x.rows(),
            found: y.len(),
        });
    }
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::DegenerateLabels);
    }
    let idx = y
        .iter()
        .map(|c| classes.binary_search(c).unwrap())
        .collect();
    Ok((classes, idx))
}

pub(crate) fn check_width(x: &Matrix, dim: usize) -> Result<()> {
    if x.cols() != dim && x.rows() > 0 {
        return Err(Error::Dimension {
            expected: dim,
            found: x.cols(),
        });
    }
    Ok(())
}

/// Which model to build, with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Logistic(LogisticConfig),
    LinearSvm(SvmConfig),
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Logistic(LogisticConfig::default())
    }
}

impl ModelSpec {
    pub fn build(&self) -> Classifier {
        match *self {
            ModelSpec::Logistic(cfg) => Classifier::Logistic(LogisticRegression::new(cfg)),
            ModelSpec::LinearSvm(cfg) => Classifier::LinearSvm(LinearSvm::new(cfg)),
        }
    }

    /// Same model with a cheaper training budget; used for scratch retraining.
    pub fn with_epochs(&self, epochs: usize) -> ModelSpec {
        match *self {
            ModelSpec::Logistic(cfg) => ModelSpec::Logistic(LogisticConfig { epochs, ..cfg }),
            ModelSpec::LinearSvm(cfg) => ModelSpec::LinearSvm(cfg),
        }
    }

    /// Same model with its sampling seed replaced (no-op for deterministic solvers).
    pub fn with_seed(&self, seed: u64) -> ModelSpec {
        match *self {
            ModelSpec::Logistic(cfg) => ModelSpec::Logistic(cfg),
            ModelSpec::LinearSvm(cfg) => ModelSpec::LinearSvm(SvmConfig { seed, ..cfg }),
        }
    }
}

/// A concrete model chosen at runtime.
#[derive(Debug, Clone)]
pub enum Classifier {
    Logistic(LogisticRegression),
    LinearSvm(LinearSvm),
}

impl Classifier {
    fn inner(&self) -> &dyn Model {
        match self {
            Classifier::Logistic(m) => m,
            Classifier::LinearSvm(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Model {
        match self {
            Classifier::Logistic(m) => m,
            Classifier::LinearSvm(m) => m,
        }
    }
}

impl Model for Classifier {
    fn fit(&mut self, x: &Matrix, y: &[ClassId]) -> Result<()> {
        self.inner_mut().fit(x, y)
    }

    fn classes(&self) -> Option<&[ClassId]> {
        self.inner().classes()
    }

    fn predict_real(&self, x: &Matrix) -> Result<Matrix> {
        self.inner().predict_real(x)
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        self.inner().predict_proba(x)
    }
}
