//! Distribution and weight invariants of ALBL over many simulated rounds.

use active_core::{
    Albl, AlblConfig, Pool, QueryStrategy, RandomSampling, UncertaintyMethod, UncertaintySampling,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_fixture(rng: &mut ChaCha8Rng) -> (Pool, Vec<usize>) {
    let n = rng.gen_range(6..30);
    let d = rng.gen_range(1..4);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let truth: Vec<usize> = (0..n).map(|i| if i < 2 { i } else { rng.gen_range(0..2) }).collect();
    let labels = (0..n).map(|i| if i < 2 { Some(truth[i]) } else { None }).collect();
    (Pool::new(x, labels).unwrap(), truth)
}

/// Checks, every round: Σq = 1 ± 1e-9, min q ≥ δ/|U| − 1e-12, weights positive and
/// summing to K ± 1e-9. Fresh random fixtures are drawn whenever a pool runs dry.
pub fn invariant_violations(rounds: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut violations = Vec::new();
    while done < rounds {
        let (mut pool, truth) = random_fixture(&mut rng);
        let k = rng.gen_range(1..5);
        let delta = rng.gen_range(0.01..1.0);
        let candidates: Vec<Box<dyn QueryStrategy>> = (0..k)
            .map(|j| -> Box<dyn QueryStrategy> {
                if j % 2 == 0 {
                    Box::new(RandomSampling::new(&mut pool, done as u64 + j as u64))
                } else {
                    Box::new(UncertaintySampling::new(&mut pool, UncertaintyMethod::Entropy, Default::default()))
                }
            })
            .collect();
        let config = AlblConfig { delta, seed: done as u64, ..Default::default() };
        let mut albl = Albl::new(&mut pool, candidates, config).unwrap();
        while pool.n_unlabeled() > 0 && done < rounds {
            let id = albl.make_query(&pool).unwrap();
            let q: Vec<f64> = albl.last_distribution().iter().map(|e| e.1).collect();
            let floor = delta / q.len() as f64;
            let sum: f64 = q.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                violations.push(format!("round {done}: sum q = {sum}"));
            }
            if q.iter().any(|&v| v < floor - 1e-12) {
                violations.push(format!("round {done}: q below floor {floor}"));
            }
            pool.update(id, truth[id]).unwrap();
            albl.sync(&pool).unwrap();
            let w = albl.weights();
            if w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                violations.push(format!("round {done}: weights {w:?}"));
            }
            if (w.iter().sum::<f64>() - k as f64).abs() > 1e-9 {
                violations.push(format!("round {done}: weight sum {}", w.iter().sum::<f64>()));
            }
            done += 1;
        }
    }
    violations
}
