use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_width, index_classes, Model};
use crate::error::{Error, Result};
use crate::math::{dot, sigmoid, sqrt};
use crate::matrix::Matrix;
use crate::pool::ClassId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub lambda: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Slope of the sigmoid used to squash decision values into probabilities.
    pub squash: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            iterations: 2000,
            seed: 0,
            squash: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
struct Fitted {
    classes: Vec<ClassId>,
    dim: usize,
    /// One `[w; b]` block per binary subproblem.
    units: Vec<Vec<f64>>,
}

/// Linear SVM trained with Pegasos on the hinge loss; one-vs-rest for more than two classes.
///
/// The bias is folded in as a constant feature, so it is regularised along
/// with the weights.
#[derive(Debug, Clone, Default)]
pub struct LinearSvm {
    config: SvmConfig,
    fitted: Option<Fitted>,
}

fn pegasos(x: &Matrix, signs: &[f64], cfg: &SvmConfig, stream: u64) -> Vec<f64> {
    let d = x.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut w = vec![0.0; d + 1];
    let radius = 1.0 / sqrt(cfg.lambda);
    for t in 1..=cfg.iterations {
        let i = rng.gen_range(0..x.rows());
        let row = x.row(i);
        let eta = 1.0 / (cfg.lambda * t as f64);
        let margin = signs[i] * (dot(&w[..d], row) + w[d]);
        let shrink = 1.0 - eta * cfg.lambda;
        for v in &mut w {
            *v *= shrink;
        }
        if margin < 1.0 {
            let s = eta * signs[i];
            for (v, xj) in w[..d].iter_mut().zip(row) {
                *v += s * xj;
            }
            w[d] += s;
        }
        let norm = sqrt(w.iter().map(|v| v * v).sum());
        if norm > radius {
            let scale = radius / norm;
            for v in &mut w {
                *v *= scale;
            }
        }
    }
    w
}

impl LinearSvm {
    pub fn new(config: SvmConfig) -> Self {
        Self {
            config,
            fitted: None,
        }
    }

    pub fn config(&self) -> &SvmConfig {
        &self.config
    }

    fn decision(&self, x: &Matrix) -> Result<Matrix> {
        let f = self.fitted.as_ref().ok_or(Error::Untrained)?;
        check_width(x, f.dim)?;
        let k = f.classes.len();
        let mut out = Matrix::zeros(x.rows(), k);
        for (i, row) in x.iter_rows().enumerate() {
            let eval = |w: &[f64]| dot(&w[..f.dim], row) + w[f.dim];
            if k == 2 {
                let z = eval(&f.units[0]);
                out[(i, 0)] = -z;
                out[(i, 1)] = z;
            } else {
                for (c, w) in f.units.iter().enumerate() {
                    out[(i, c)] = eval(w);
                }
            }
        }
        Ok(out)
    }
}

impl Model for LinearSvm {
    fn fit(&mut self, x: &Matrix, y: &[ClassId]) -> Result<()> {
        let (classes, targets) = index_classes(x, y)?;
        let positive: Vec<usize> = if classes.len() == 2 {
            vec![1]
        } else {
            (0..classes.len()).collect()
        };
        let units = positive
            .iter()
            .map(|&c| {
                let signs: Vec<f64> = targets
                    .iter()
                    .map(|&t| if t == c { 1.0 } else { -1.0 })
                    .collect();
                pegasos(x, &signs, &self.config, c as u64)
            })
            .collect();
        self.fitted = Some(Fitted {
            classes,
            dim: x.cols(),
            units,
        });
        Ok(())
    }

    fn classes(&self) -> Option<&[ClassId]> {
        self.fitted.as_ref().map(|f| f.classes.as_slice())
    }

    fn predict_real(&self, x: &Matrix) -> Result<Matrix> {
        self.decision(x)
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        let mut m = self.decision(x)?;
        let a = self.config.squash;
        for i in 0..m.rows() {
            if m.cols() == 2 {
                let p = sigmoid(a * m[(i, 1)]);
                m[(i, 0)] = 1.0 - p;
                m[(i, 1)] = p;
            } else {
                let row = m.row_mut(i);
                for v in row.iter_mut() {
                    *v = sigmoid(a * *v);
                }
                let total: f64 = row.iter().sum();
                for v in row.iter_mut() {
                    *v /= total;
                }
            }
        }
        Ok(m)
    }
}
