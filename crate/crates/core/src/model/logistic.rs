use alloc::vec;
use alloc::vec::Vec;

use super::{check_width, index_classes, Model};
use crate::error::{Error, Result};
use crate::math::{dot, log_sum_exp, sigmoid, softmax, softplus, sqrt};
use crate::matrix::Matrix;
use crate::pool::ClassId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig {
    /// L2 penalty on weights (biases are not penalised).
    pub l2: f64,
    pub epochs: usize,
    pub step: f64,
    /// Training stops once the gradient norm drops below this.
    pub tolerance: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            l2: 0.01,
            epochs: 500,
            step: 0.1,
            tolerance: 1e-6,
        }
    }
}

/// Mean cross-entropy plus `l2/2 * ||W||²`, over a flat parameter vector.
///
/// Two classes use a single logistic unit with parameters `[w; b]`
/// (length `d + 1`). More classes use one softmax row per class, laid out
/// as `K` consecutive blocks of `[w_c; b_c]`.
pub struct LogisticObjective<'a> {
    x: &'a Matrix,
    targets: &'a [usize],
    n_classes: usize,
    l2: f64,
}

impl<'a> LogisticObjective<'a> {
    /// `targets[i]` is the class position (0-based) of row `i`.
    pub fn new(x: &'a Matrix, targets: &'a [usize], n_classes: usize, l2: f64) -> Self {
        Self {
            x,
            targets,
            n_classes,
            l2,
        }
    }

    fn units(&self) -> usize {
        if self.n_classes == 2 {
            1
        } else {
            self.n_classes
        }
    }

    pub fn n_params(&self) -> usize {
        self.units() * (self.x.cols() + 1)
    }

    fn logits(&self, params: &[f64], row: &[f64], out: &mut [f64]) {
        let stride = row.len() + 1;
        for (u, z) in out.iter_mut().enumerate() {
            let block = &params[u * stride..(u + 1) * stride];
            *z = dot(&block[..row.len()], row) + block[row.len()];
        }
    }

    fn penalty(&self, params: &[f64]) -> f64 {
        let d = self.x.cols();
        params
            .chunks_exact(d + 1)
            .map(|b| b[..d].iter().map(|w| w * w).sum::<f64>())
            .sum::<f64>()
            * self.l2
            / 2.0
    }

    pub fn value(&self, params: &[f64]) -> f64 {
        let n = self.x.rows() as f64;
        let mut z = vec![0.0; self.units()];
        let mut loss = 0.0;
        for (row, &t) in self.x.iter_rows().zip(self.targets) {
            self.logits(params, row, &mut z);
            loss += if self.n_classes == 2 {
                softplus(z[0]) - if t == 1 { z[0] } else { 0.0 }
            } else {
                log_sum_exp(&z) - z[t]
            };
        }
        loss / n + self.penalty(params)
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let d = self.x.cols();
        let stride = d + 1;
        let n = self.x.rows() as f64;
        let mut grad = vec![0.0; params.len()];
        let mut z = vec![0.0; self.units()];
        for (row, &t) in self.x.iter_rows().zip(self.targets) {
            self.logits(params, row, &mut z);
            let resid: Vec<f64> = if self.n_classes == 2 {
                vec![sigmoid(z[0]) - if t == 1 { 1.0 } else { 0.0 }]
            } else {
                let mut p = softmax(&z);
                p[t] -= 1.0;
                p
            };
            for (u, r) in resid.iter().enumerate() {
                let g = &mut grad[u * stride..(u + 1) * stride];
                for (gj, xj) in g[..d].iter_mut().zip(row) {
                    *gj += r * xj;
                }
                g[d] += r;
            }
        }
        for (u, block) in grad.chunks_exact_mut(stride).enumerate() {
            for (j, g) in block.iter_mut().enumerate() {
                *g /= n;
                if j < d {
                    *g += self.l2 * params[u * stride + j];
                }
            }
        }
        grad
    }
}

#[derive(Debug, Clone)]
struct Fitted {
    classes: Vec<ClassId>,
    dim: usize,
    params: Vec<f64>,
}

/// L2-regularised logistic regression trained by full-batch gradient descent.
///
/// Deterministic: parameters start at zero and no sampling is involved.
#[derive(Debug, Clone, Default)]
pub struct LogisticRegression {
    config: LogisticConfig,
    fitted: Option<Fitted>,
}

impl LogisticRegression {
    pub fn new(config: LogisticConfig) -> Self {
        Self {
            config,
            fitted: None,
        }
    }

    pub fn config(&self) -> &LogisticConfig {
        &self.config
    }

    /// Fits and returns the objective value before each epoch plus the final value.
    pub fn fit_traced(&mut self, x: &Matrix, y: &[ClassId]) -> Result<Vec<f64>> {
        let (classes, targets) = index_classes(x, y)?;
        let objective = LogisticObjective::new(x, &targets, classes.len(), self.config.l2);
        let mut params = vec![0.0; objective.n_params()];
        let mut trace = Vec::with_capacity(self.config.epochs + 1);
        for _ in 0..self.config.epochs {
            trace.push(objective.value(&params));
            let grad = objective.gradient(&params);
            if sqrt(grad.iter().map(|g| g * g).sum()) < self.config.tolerance {
                break;
            }
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= self.config.step * g;
            }
        }
        trace.push(objective.value(&params));
        self.fitted = Some(Fitted {
            classes,
            dim: x.cols(),
            params,
        });
        Ok(trace)
    }

    /// Weight matrix (classes x features). Binary models report `(-w, w)`.
    pub fn weights(&self) -> Option<Matrix> {
        let f = self.fitted.as_ref()?;
        let stride = f.dim + 1;
        let mut m = Matrix::zeros(f.classes.len(), f.dim);
        if f.classes.len() == 2 {
            for j in 0..f.dim {
                m[(0, j)] = -f.params[j];
                m[(1, j)] = f.params[j];
            }
        } else {
            for c in 0..f.classes.len() {
                m.row_mut(c)
                    .copy_from_slice(&f.params[c * stride..c * stride + f.dim]);
            }
        }
        Some(m)
    }

    fn decision(&self, x: &Matrix) -> Result<(Matrix, bool)> {
        let f = self.fitted.as_ref().ok_or(Error::Untrained)?;
        check_width(x, f.dim)?;
        let stride = f.dim + 1;
        let k = f.classes.len();
        let mut out = Matrix::zeros(x.rows(), k);
        for (i, row) in x.iter_rows().enumerate() {
            if k == 2 {
                let z = dot(&f.params[..f.dim], row) + f.params[f.dim];
                out[(i, 0)] = -z;
                out[(i, 1)] = z;
            } else {
                for c in 0..k {
                    let b = &f.params[c * stride..(c + 1) * stride];
                    out[(i, c)] = dot(&b[..f.dim], row) + b[f.dim];
                }
            }
        }
        Ok((out, k == 2))
    }
}

impl Model for LogisticRegression {
    fn fit(&mut self, x: &Matrix, y: &[ClassId]) -> Result<()> {
        self.fit_traced(x, y).map(|_| ())
    }

    fn classes(&self) -> Option<&[ClassId]> {
        self.fitted.as_ref().map(|f| f.classes.as_slice())
    }

    fn predict_real(&self, x: &Matrix) -> Result<Matrix> {
        self.decision(x).map(|(m, _)| m)
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        let (mut m, binary) = self.decision(x)?;
        for i in 0..m.rows() {
            if binary {
                let p = sigmoid(m[(i, 1)]);
                m[(i, 0)] = 1.0 - p;
                m[(i, 1)] = p;
            } else {
                let p = softmax(m.row(i));
                m.row_mut(i).copy_from_slice(&p);
            }
        }
        Ok(m)
    }
}
