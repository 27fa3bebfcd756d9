//! Exhaustive, independently written re-scorings of every deterministic strategy
//! (highest score wins, lowest id on ties).

use active_core::{
    DensityWeighted, DwusConfig, EerConfig, ExpectedErrorReduction, LogisticConfig,
    LogisticRegression, Matrix, Model, Pool, QbcConfig, QueryByCommittee, QueryStrategy,
    UncertaintyMethod, UncertaintySampling,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_pool(rng: &mut ChaCha8Rng) -> (Pool, Vec<usize>) {
    let n = rng.gen_range(6..=25);
    let d = rng.gen_range(1..=5);
    let k = rng.gen_range(2..=3);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let truth: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    let n_labeled = rng.gen_range(k..=n - 2);
    let labels = (0..n).map(|i| (i < n_labeled).then_some(truth[i])).collect();
    (Pool::new(x, labels).unwrap(), truth)
}

fn labeled(pool: &Pool) -> (Matrix, Vec<usize>) {
    let view = pool.labeled_view();
    let rows: Vec<&[f64]> = view.iter().map(|e| e.1).collect();
    (Matrix::from_rows(&rows).unwrap(), view.iter().map(|e| e.2).collect())
}

fn fitted(x: &Matrix, y: &[usize], config: LogisticConfig) -> LogisticRegression {
    let mut m = LogisticRegression::new(config);
    m.fit(x, y).unwrap();
    m
}

fn proba_of(model: &LogisticRegression, row: &[f64]) -> Vec<f64> {
    model.predict_proba(&Matrix::from_rows(&[row]).unwrap()).unwrap().row(0).to_vec()
}

pub fn brute_force_argmax(scores: &[(usize, f64)]) -> usize {
    let mut best = scores[0];
    for &(id, s) in &scores[1..] {
        if s > best.1 || (s == best.1 && id < best.0) {
            best = (id, s);
        }
    }
    best.0
}

fn shannon(p: &[f64]) -> f64 {
    p.iter().map(|&v| if v > 0.0 { -v * v.ln() } else { 0.0 }).sum()
}

pub fn uncertainty_oracle(pool: &Pool, method: UncertaintyMethod) -> usize {
    let (x, y) = labeled(pool);
    let model = fitted(&x, &y, LogisticConfig::default());
    let scores: Vec<(usize, f64)> = pool
        .unlabeled_view()
        .into_iter()
        .map(|(id, row)| {
            let mut p = proba_of(&model, row);
            let s = match method {
                UncertaintyMethod::LeastConfident => 1.0 - p.iter().cloned().fold(f64::MIN, f64::max),
                UncertaintyMethod::SmallestMargin => {
                    p.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    p[1] - p[0]
                }
                UncertaintyMethod::Entropy => shannon(&p),
            };
            (id, s)
        })
        .collect();
    brute_force_argmax(&scores)
}

pub fn qbc_oracle(pool: &Pool, committee: &QueryByCommittee) -> usize {
    let scores: Vec<(usize, f64)> = pool
        .unlabeled_view()
        .into_iter()
        .map(|(id, row)| {
            let x = Matrix::from_rows(&[row]).unwrap();
            let mut counts = std::collections::BTreeMap::new();
            for m in committee.members() {
                *counts.entry(m.predict(&x).unwrap()[0]).or_insert(0usize) += 1;
            }
            let n = committee.members().len() as f64;
            let fractions: Vec<f64> = counts.values().map(|&c| c as f64 / n).collect();
            (id, shannon(&fractions))
        })
        .collect();
    brute_force_argmax(&scores)
}

pub fn dwus_oracle(pool: &Pool, sigma_pool: &[Vec<f64>]) -> usize {
    let mut dists = Vec::new();
    for i in 0..sigma_pool.len() {
        for j in i + 1..sigma_pool.len() {
            let d2: f64 = sigma_pool[i].iter().zip(&sigma_pool[j]).map(|(a, b)| (a - b).powi(2)).sum();
            dists.push(d2.sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = dists.len();
    let median = if m == 0 {
        0.0
    } else if m % 2 == 1 {
        dists[m / 2]
    } else {
        (dists[m / 2 - 1] + dists[m / 2]) / 2.0
    };
    let sigma = if median > 0.0 { median } else { 1.0 };

    let (x, y) = labeled(pool);
    let model = fitted(&x, &y, LogisticConfig::default());
    let unlabeled = pool.unlabeled_view();
    let scores: Vec<(usize, f64)> = unlabeled
        .iter()
        .map(|&(id, row)| {
            let density = unlabeled
                .iter()
                .map(|&(_, u)| {
                    let d2: f64 = row.iter().zip(u).map(|(a, b)| (a - b).powi(2)).sum();
                    (-d2 / (2.0 * sigma * sigma)).exp()
                })
                .sum::<f64>()
                / unlabeled.len() as f64;
            (id, shannon(&proba_of(&model, row)) * density)
        })
        .collect();
    brute_force_argmax(&scores)
}

pub fn eer_oracle(pool: &Pool) -> usize {
    let (x, y) = labeled(pool);
    let model = fitted(&x, &y, LogisticConfig::default());
    let classes = model.classes().unwrap().to_vec();
    let unlabeled = pool.unlabeled_view();
    let scores: Vec<(usize, f64)> = unlabeled
        .iter()
        .map(|&(id, row)| {
            let p = proba_of(&model, row);
            let mut expected = 0.0;
            for (ci, &label) in classes.iter().enumerate() {
                let mut xs: Vec<&[f64]> = x.iter_rows().collect();
                xs.push(row);
                let mut ys = y.clone();
                ys.push(label);
                let scratch = fitted(
                    &Matrix::from_rows(&xs).unwrap(),
                    &ys,
                    LogisticConfig { epochs: 100, ..Default::default() },
                );
                let future: f64 = unlabeled
                    .iter()
                    .filter(|e| e.0 != id)
                    .map(|&(_, u)| 1.0 - proba_of(&scratch, u).into_iter().fold(f64::MIN, f64::max))
                    .sum();
                expected += p[ci] * future;
            }
            (id, -expected)
        })
        .collect();
    brute_force_argmax(&scores)
}

/// Runs two query/update rounds on each of `n_pools` random pools and compares every
/// strategy with its oracle. Returns the number of comparisons and the mismatches.
pub fn oracle_mismatches(n_pools: u64, seed: u64) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0;
    let mut mismatches = Vec::new();
    let mut expect = |what: String, got: usize, want: usize| {
        compared += 1;
        if got != want {
            mismatches.push(format!("{what}: strategy chose {got}, oracle {want}"));
        }
    };
    let methods = [
        UncertaintyMethod::LeastConfident,
        UncertaintyMethod::SmallestMargin,
        UncertaintyMethod::Entropy,
    ];
    for trial in 0..n_pools {
        let (mut pool, truth) = random_pool(&mut rng);
        let sigma_pool: Vec<Vec<f64>> = pool.unlabeled_view().iter().map(|e| e.1.to_vec()).collect();
        let mut uncertainty: Vec<UncertaintySampling> = methods
            .iter()
            .map(|&m| UncertaintySampling::new(&mut pool, m, Default::default()))
            .collect();
        let mut qbc = QueryByCommittee::new(&mut pool, QbcConfig { seed: trial, ..Default::default() }).unwrap();
        let mut dwus = DensityWeighted::new(&mut pool, DwusConfig { seed: trial, ..Default::default() });
        let mut eer = ExpectedErrorReduction::new(&mut pool, EerConfig { seed: trial, ..Default::default() });

        for round in 0..2 {
            for (s, &m) in uncertainty.iter_mut().zip(&methods) {
                let got = s.make_query(&pool).unwrap();
                expect(format!("pool {trial} round {round} {m:?}"), got, uncertainty_oracle(&pool, m));
            }
            let got = qbc.make_query(&pool).unwrap();
            expect(format!("pool {trial} round {round} qbc"), got, qbc_oracle(&pool, &qbc));
            let got = dwus.make_query(&pool).unwrap();
            expect(format!("pool {trial} round {round} dwus"), got, dwus_oracle(&pool, &sigma_pool));
            let got = eer.make_query(&pool).unwrap();
            expect(format!("pool {trial} round {round} eer"), got, eer_oracle(&pool));

            let ids = pool.unlabeled_ids();
            let id = ids[rng.gen_range(0..ids.len())];
            pool.update(id, truth[id]).unwrap();
        }
    }
    (compared, mismatches)
}
