mod support;

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use active_core::{parse_libsvm, seed_pool, split, to_libsvm_string, Error, Pool, RawDataset};
use proptest::prelude::*;
use support::protocol::{
    build, drain_fixture, drain_violations, fuzz_violations, parse_is_well_behaved,
    roundtrip_violations, BUNDLED,
};

fn pool_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Option<usize>>)> {
    (1usize..30, 1usize..4).prop_flat_map(|(n, d)| {
        (
            prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), n),
            prop::collection::vec(prop::option::of(0usize..3), n),
        )
    })
}

proptest! {
    #[test]
    fn views_partition_the_pool((x, labels) in pool_strategy(), ops in prop::collection::vec((0usize..40, 0usize..3), 0..40)) {
        let mut pool = Pool::new(x.clone(), labels).unwrap();
        for (id, label) in ops {
            let before = pool.label(id);
            match pool.update(id, label) {
                Ok(()) => prop_assert_eq!(before.unwrap(), None),
                Err(Error::NotFound(_)) => prop_assert!(id >= pool.len()),
                Err(Error::AlreadyLabeled(_)) => prop_assert!(before.unwrap().is_some()),
                Err(e) => prop_assert!(false, "unexpected {e:?}"),
            }
            let labeled: BTreeSet<usize> = pool.labeled_view().iter().map(|e| e.0).collect();
            let unlabeled: BTreeSet<usize> = pool.unlabeled_view().iter().map(|e| e.0).collect();
            prop_assert!(labeled.is_disjoint(&unlabeled));
            prop_assert_eq!(labeled.len() + unlabeled.len(), pool.len());
            prop_assert_eq!(labeled.len(), pool.n_labeled());
            // ids are stable: features never move
            for (i, row) in x.iter().enumerate() {
                prop_assert_eq!(pool.features(i).unwrap(), row.as_slice());
            }
        }
    }

    #[test]
    fn every_callback_fires_once_per_successful_update((x, labels) in pool_strategy(), n_callbacks in 0usize..5, ops in prop::collection::vec(0usize..40, 0..40)) {
        let mut pool = Pool::new(x, labels).unwrap();
        let log = Arc::new(Mutex::new(Vec::new()));
        for c in 0..n_callbacks {
            let log = Arc::clone(&log);
            pool.on_update(move |ev| log.lock().unwrap().push((c, ev.entry_id)));
        }
        let mut successes = Vec::new();
        for id in ops {
            if pool.update(id, 0).is_ok() {
                successes.push(id);
            }
        }
        let log = log.lock().unwrap();
        prop_assert_eq!(log.len(), n_callbacks * successes.len());
        // registration order within each update
        let want: Vec<(usize, usize)> = successes.iter().flat_map(|&id| (0..n_callbacks).map(move |c| (c, id))).collect();
        prop_assert_eq!(&*log, &want);
    }
}

/// 25 unlabeled entries drain in exactly 25 distinct queries, then the strategy reports exhaustion.
#[test]
fn every_strategy_drains_a_25_entry_pool() {
    let violations = drain_violations(3);
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn strategies_reject_a_foreign_pool() {
    let (mut pool, _) = drain_fixture(0);
    let (other, _) = drain_fixture(0);
    for name in ["random", "uncertainty", "qbc", "dwus", "eer", "albl"] {
        let mut s = build(name, &mut pool, 0);
        assert_eq!(s.make_query(&other), Err(Error::PoolMismatch), "{name}");
    }
}

fn assert_same(a: &RawDataset, b: &RawDataset) {
    assert_eq!(a.labels.len(), b.labels.len());
    assert_eq!(a.features, b.features);
    let tokens = |d: &RawDataset| d.labels.iter().map(|&l| d.class_table[l].clone()).collect::<Vec<_>>();
    assert_eq!(tokens(a), tokens(b));
}

#[test]
fn bundled_datasets_roundtrip() {
    let violations = roundtrip_violations();
    assert!(violations.is_empty(), "{violations:?}");
}

fn dataset_strategy() -> impl Strategy<Value = RawDataset> {
    (1usize..20, 1usize..6, 1usize..4).prop_flat_map(|(n, d, k)| {
        (
            prop::collection::vec(
                prop::collection::vec(prop_oneof![Just(0.0), -1e6f64..1e6, -1.0f64..1.0], d),
                n,
            ),
            prop::collection::vec(0..k, n),
        )
            .prop_map(move |(rows, labels)| {
                let names = ["+1", "-1", "7"];
                let mut table: Vec<String> = Vec::new();
                let labels = labels
                    .into_iter()
                    .map(|l| match table.iter().position(|t| t == names[l]) {
                        Some(c) => c,
                        None => {
                            table.push(names[l].to_string());
                            table.len() - 1
                        }
                    })
                    .collect();
                RawDataset {
                    features: active_core::Matrix::from_rows(&rows).unwrap(),
                    labels,
                    class_table: table,
                }
            })
    })
}

proptest! {
    #[test]
    fn generated_datasets_roundtrip(ds in dataset_strategy()) {
        let text = to_libsvm_string(&ds);
        let again = parse_libsvm(&text).unwrap();
        assert_same(&ds, &again);
    }

    #[test]
    fn split_is_deterministic_and_partitions(ds in dataset_strategy(), frac in 0.05f64..0.95, seed in any::<u64>()) {
        match split(&ds, frac, seed) {
            Ok((train, test)) => {
                let (train2, test2) = split(&ds, frac, seed).unwrap();
                prop_assert_eq!(&train, &train2);
                prop_assert_eq!(&test, &test2);
                prop_assert_eq!(test.len(), (ds.len() as f64 * frac).round() as usize);
                let key = |d: &RawDataset, i: usize| format!("{:?}|{}", d.features.row(i), d.labels[i]);
                let mut whole: Vec<String> = (0..ds.len()).map(|i| key(&ds, i)).collect();
                let mut parts: Vec<String> = (0..train.len()).map(|i| key(&train, i)).chain((0..test.len()).map(|i| key(&test, i))).collect();
                whole.sort();
                parts.sort();
                prop_assert_eq!(whole, parts);
            }
            Err(Error::Split(_)) => {
                let n_test = (ds.len() as f64 * frac).round() as usize;
                prop_assert!(n_test == 0 || n_test >= ds.len());
            }
            Err(e) => prop_assert!(false, "unexpected {e:?}"),
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[-+0-9a-z:. #\\t\\n]{0,200}") {
        prop_assert!(parse_is_well_behaved(&text).is_ok(), "{:?}", parse_is_well_behaved(&text));
    }
}

/// 100 corrupted variants of the bundled files: each parses or fails with a valid line number.
#[test]
fn fuzzed_files_fail_cleanly() {
    let (violations, rejected) = fuzz_violations(100, 99);
    assert!(violations.is_empty(), "{violations:?}");
    assert!(rejected > 0, "fuzzing never produced an invalid file");
}

#[test]
fn malformed_lines_are_reported_by_number() {
    let cases = [
        ("+1 1:0.5\nfoo 1:1\n", 2),
        ("+1 1:0.5\n-1 2:1 1:3\n", 2),
        ("+1 1:0.5\n\n-1 0:1\n", 3),
        ("+1 1:x\n", 1),
        ("+1 1:0.5 2\n", 1),
        ("+1 1:nan\n", 1),
        ("", 1),
        ("# only a comment\n\n", 2),
        ("+1\n-1\n", 2),
    ];
    for (text, line) in cases {
        match parse_libsvm(text) {
            Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn seeded_pools_cover_two_classes_and_are_reproducible() {
    let ds = parse_libsvm(BUNDLED[0].1).unwrap();
    for seed in 0..20 {
        let a = seed_pool(&ds, 10, seed).unwrap();
        let b = seed_pool(&ds, 10, seed).unwrap();
        assert_eq!(a.pool.labeled_ids(), b.pool.labeled_ids());
        assert_eq!(a.pool.n_labeled(), 10);
        assert!(a.pool.distinct_labels().len() >= 2);
        assert_eq!(a.truth, ds.labels);
    }
}
