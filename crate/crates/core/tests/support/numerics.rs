//! Finite-difference and output-consistency checks for the models.

use active_core::model::LogisticObjective;
use active_core::{LinearSvm, LogisticRegression, Matrix, Model, SvmConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-scale..scale)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

fn central_difference(f: impl Fn(&[f64]) -> f64, at: &[f64], h: f64) -> Vec<f64> {
    (0..at.len())
        .map(|i| {
            let mut plus = at.to_vec();
            let mut minus = at.to_vec();
            plus[i] += h;
            minus[i] -= h;
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / norm(a).max(norm(b)).max(1e-12)
}

/// Relative error between the analytic gradient and central differences (h = 1e-5)
/// at `points` random parameter vectors, for both the binary and a 3-class objective.
pub fn gradient_errors(points: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_matrix(&mut rng, 20, 5, 2.0);
    let mut errors = Vec::new();
    for n_classes in [2usize, 3] {
        let targets: Vec<usize> = (0..20).map(|i| i % n_classes).collect();
        let objective = LogisticObjective::new(&x, &targets, n_classes, 0.01);
        for _ in 0..points {
            let params: Vec<f64> = (0..objective.n_params()).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let analytic = objective.gradient(&params);
            let numeric = central_difference(|p| objective.value(p), &params, 1e-5);
            errors.push(relative_error(&analytic, &numeric));
        }
    }
    errors
}

/// Lowest index among the maxima.
pub fn first_max(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Trained logistic and SVM models, binary and 3-class.
pub fn fitted_models(rng: &mut ChaCha8Rng) -> Vec<(String, Box<dyn Model>)> {
    let mut out: Vec<(String, Box<dyn Model>)> = Vec::new();
    for n_classes in [2usize, 3] {
        let x = random_matrix(rng, 30, 4, 1.0);
        let y: Vec<usize> = (0..30).map(|i| i % n_classes).collect();
        let mut lr = LogisticRegression::default();
        lr.fit(&x, &y).unwrap();
        out.push((format!("logreg/{n_classes}"), Box::new(lr)));
        let mut svm = LinearSvm::new(SvmConfig { seed: 3, ..Default::default() });
        svm.fit(&x, &y).unwrap();
        out.push((format!("linsvm/{n_classes}"), Box::new(svm)));
    }
    out
}

/// predict = argmax(predict_real) = argmax(predict_proba), probability rows in [0,1]
/// summing to 1 ± 1e-9, over `batches` random batches for every model.
pub fn consistency_violations(batches: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let models = fitted_models(&mut rng);
    let mut violations = Vec::new();
    for b in 0..batches {
        let batch = random_matrix(&mut rng, 16, 4, 3.0);
        for (name, model) in &models {
            let classes = model.classes().unwrap();
            let predicted = model.predict(&batch).unwrap();
            let real = model.predict_real(&batch).unwrap();
            let proba = model.predict_proba(&batch).unwrap();
            for i in 0..batch.rows() {
                if predicted[i] != classes[first_max(real.row(i))] {
                    violations.push(format!("{name} batch {b} row {i}: predict vs predict_real"));
                }
                if predicted[i] != classes[first_max(proba.row(i))] {
                    violations.push(format!("{name} batch {b} row {i}: predict vs predict_proba"));
                }
                let sum: f64 = proba.row(i).iter().sum();
                if (sum - 1.0).abs() > 1e-9 || !proba.row(i).iter().all(|p| (0.0..=1.0).contains(p)) {
                    violations.push(format!("{name} batch {b} row {i}: probabilities {:?}", proba.row(i)));
                }
            }
        }
    }
    violations
}
