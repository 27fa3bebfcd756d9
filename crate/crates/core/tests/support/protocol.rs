//! Pool protocol and LIBSVM checks.

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use active_core::{
    parse_libsvm, to_libsvm_string, Albl, AlblConfig, DensityWeighted, EerConfig, Error,
    ExpectedErrorReduction, Pool, QbcConfig, QueryByCommittee, QueryStrategy, RandomSampling,
    UncertaintyMethod, UncertaintySampling,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUNDLED: [(&str, &str); 3] = [
    ("heart", include_str!("../../../../data/heart.libsvm")),
    ("australian", include_str!("../../../../data/australian.libsvm")),
    ("diabetes", include_str!("../../../../data/diabetes.libsvm")),
];

pub const STRATEGIES: [&str; 8] = [
    "random",
    "uncertainty-lc",
    "uncertainty-margin",
    "uncertainty",
    "qbc",
    "dwus",
    "eer",
    "albl",
];

/// 2 labeled seeds plus 25 unlabeled entries in two noisy clusters.
pub fn drain_fixture(seed: u64) -> (Pool, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<usize> = (0..27).map(|i| if i < 2 { i } else { rng.gen_range(0..2) }).collect();
    let x = truth
        .iter()
        .map(|&c| vec![c as f64 * 2.0 - 1.0 + rng.gen_range(-1.2..1.2), rng.gen_range(-1.0..1.0)])
        .collect();
    let labels = (0..27).map(|i| (i < 2).then_some(truth[i])).collect();
    (Pool::new(x, labels).unwrap(), truth)
}

pub fn build(name: &str, pool: &mut Pool, seed: u64) -> Box<dyn QueryStrategy> {
    match name {
        "random" => Box::new(RandomSampling::new(pool, seed)),
        "uncertainty-lc" => Box::new(UncertaintySampling::new(pool, UncertaintyMethod::LeastConfident, Default::default())),
        "uncertainty-margin" => Box::new(UncertaintySampling::new(pool, UncertaintyMethod::SmallestMargin, Default::default())),
        "uncertainty" => Box::new(UncertaintySampling::new(pool, UncertaintyMethod::Entropy, Default::default())),
        "qbc" => Box::new(QueryByCommittee::new(pool, QbcConfig { seed, ..Default::default() }).unwrap()),
        "dwus" => Box::new(DensityWeighted::new(pool, Default::default())),
        "eer" => Box::new(ExpectedErrorReduction::new(pool, EerConfig { seed, ..Default::default() })),
        "albl" => {
            let candidates = ["uncertainty", "random", "qbc", "dwus"].iter().map(|n| build(n, pool, seed)).collect();
            Box::new(Albl::new(pool, candidates, AlblConfig { seed, ..Default::default() }).unwrap())
        }
        other => panic!("unknown strategy {other}"),
    }
}

/// Every strategy empties 25 unlabeled entries in exactly 25 distinct queries, then
/// reports exhaustion.
pub fn drain_violations(seeds: u64) -> Vec<String> {
    let mut violations = Vec::new();
    for name in STRATEGIES {
        for seed in 0..seeds {
            let (mut pool, truth) = drain_fixture(seed);
            let mut strategy = build(name, &mut pool, seed);
            let mut seen = BTreeSet::new();
            for _ in 0..25 {
                let id = match strategy.make_query(&pool) {
                    Ok(id) => id,
                    Err(e) => {
                        violations.push(format!("{name}/{seed}: {e}"));
                        break;
                    }
                };
                if pool.label(id) != Ok(None) || !seen.insert(id) {
                    violations.push(format!("{name}/{seed}: queried {id} twice or labeled"));
                    break;
                }
                pool.update(id, truth[id]).unwrap();
                strategy.sync(&pool).unwrap();
            }
            if seen.len() != 25 || pool.n_unlabeled() != 0 {
                violations.push(format!("{name}/{seed}: {} distinct queries", seen.len()));
            }
            if strategy.make_query(&pool) != Err(Error::Exhausted) {
                violations.push(format!("{name}/{seed}: drained pool not reported exhausted"));
            }
        }
    }
    violations
}

/// Each of k observers fires exactly once per successful update, in registration
/// order, and never for a rejected one.
pub fn callback_violations(cases: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for case in 0..cases {
        let n = rng.gen_range(1..30);
        let x = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0)]).collect();
        let labels = (0..n).map(|_| rng.gen_bool(0.3).then_some(0)).collect();
        let mut pool = Pool::new(x, labels).unwrap();
        let k = rng.gen_range(0..5);
        let log = Arc::new(Mutex::new(Vec::new()));
        for c in 0..k {
            let log = Arc::clone(&log);
            pool.on_update(move |ev| log.lock().unwrap().push((c, ev.entry_id)));
        }
        let mut successes = Vec::new();
        for _ in 0..rng.gen_range(0..40) {
            let id = rng.gen_range(0..n + 5);
            if pool.update(id, 1).is_ok() {
                successes.push(id);
            }
        }
        let want: Vec<(usize, usize)> = successes.iter().flat_map(|&id| (0..k).map(move |c| (c, id))).collect();
        if *log.lock().unwrap() != want {
            violations.push(format!("case {case}: {k} callbacks, {} updates", successes.len()));
        }
    }
    violations
}

/// Parse, re-emit, reparse: identical matrices and label tokens.
pub fn roundtrip_violations() -> Vec<String> {
    let mut violations = Vec::new();
    for (name, text) in BUNDLED {
        let ds = match parse_libsvm(text) {
            Ok(ds) => ds,
            Err(e) => {
                violations.push(format!("{name}: {e}"));
                continue;
            }
        };
        let again = parse_libsvm(&to_libsvm_string(&ds)).unwrap();
        let tokens = |d: &active_core::RawDataset| d.labels.iter().map(|&l| d.class_table[l].clone()).collect::<Vec<_>>();
        if again.features != ds.features || tokens(&again) != tokens(&ds) {
            violations.push(format!("{name}: roundtrip changed the data"));
        }
    }
    violations
}

/// Success (and a clean roundtrip), or a parse error pointing at an existing line.
pub fn parse_is_well_behaved(text: &str) -> Result<bool, String> {
    let n_lines = text.lines().count().max(1);
    match std::panic::catch_unwind(|| parse_libsvm(text)) {
        Err(_) => Err("parser panicked".into()),
        Ok(Ok(ds)) => {
            let again = parse_libsvm(&to_libsvm_string(&ds)).map_err(|e| format!("reparse failed: {e}"))?;
            if again.features == ds.features {
                Ok(true)
            } else {
                Err("roundtrip changed features".into())
            }
        }
        Ok(Err(Error::Parse { line, .. })) if (1..=n_lines).contains(&line) => Ok(false),
        Ok(Err(e)) => Err(format!("bad error {e:?} for {n_lines} lines")),
    }
}

pub fn mutate(text: &str, rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[u8] = b"0123456789:.-+ \teE#xn\n";
    let mut bytes: Vec<u8> = text.bytes().collect();
    for _ in 0..rng.gen_range(1..6) {
        let at = rng.gen_range(0..=bytes.len());
        let c = ALPHABET[rng.gen_range(0..ALPHABET.len())];
        match rng.gen_range(0..3) {
            0 if at < bytes.len() => bytes[at] = c,
            1 if at < bytes.len() => {
                bytes.remove(at);
            }
            _ => bytes.insert(at, c),
        }
    }
    String::from_utf8(bytes).unwrap()
}

/// `files` corrupted excerpts of the bundled datasets. Returns the violations and how
/// many of the files were rejected.
pub fn fuzz_violations(files: usize, seed: u64) -> (Vec<String>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut rejected = 0;
    for i in 0..files {
        let (name, text) = BUNDLED[i % 3];
        let head: String = text.lines().take(rng.gen_range(1..40)).collect::<Vec<_>>().join("\n");
        let fuzzed = mutate(&head, &mut rng);
        match parse_is_well_behaved(&fuzzed) {
            Ok(true) => {}
            Ok(false) => rejected += 1,
            Err(e) => violations.push(format!("file {i} ({name}): {e}")),
        }
    }
    (violations, rejected)
}
