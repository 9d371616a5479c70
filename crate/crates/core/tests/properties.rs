use proptest::prelude::*;

use pdla::classifier::{assign_label, mapca};
use pdla::dataset::{parse_csv, to_csv, Exemplar, ExemplarSet};
use pdla::dla::{mismatch, DlaConfig, MemoryStore};
use pdla::harness::TrendSeries;
use pdla::representation::{apply_sks, encode, EncoderConfig, IntegerChunk, SksPolicy};

fn chunk_strategy(max_len: usize, span: i64) -> impl Strategy<Value = IntegerChunk> {
    prop::collection::vec(-span..=span, 1..=max_len).prop_map(|u| IntegerChunk::new(u).unwrap())
}

/// Values with at most six significant digits.
fn six_digit_value() -> impl Strategy<Value = f64> {
    (-999_999i64..=999_999, -4i32..=3).prop_map(|(m, e)| format!("{m}e{e}").parse().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csv_round_trip(
        rows in prop::collection::vec(
            ("[A-Za-z][A-Za-z ]{0,10}[A-Za-z]", prop::collection::vec(six_digit_value(), 3)),
            1..20,
        )
    ) {
        let exemplars: Vec<Exemplar> = rows
            .into_iter()
            .map(|(l, f)| Exemplar::new(l, f).unwrap())
            .collect();
        let set = ExemplarSet::new(exemplars).unwrap();
        let back = parse_csv(&to_csv(&set).unwrap(), false).unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn encode_is_monotone(a in -1e6f64..1e6, b in -1e6f64..1e6, d in 0u32..=9) {
        let cfg = EncoderConfig::new(d).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let ul = encode(&[lo], cfg).unwrap().units()[0];
        let uh = encode(&[hi], cfg).unwrap().units()[0];
        prop_assert!(ul <= uh);
    }

    #[test]
    fn sks_lengths_and_composition(len in 0usize..300, a in 1usize..12, b in 1usize..12) {
        let s: Vec<usize> = (0..len).collect();
        let pa = SksPolicy::new(a).unwrap();
        let once = apply_sks(&s, pa);
        prop_assert_eq!(once.len(), len.div_ceil(a));
        let twice = apply_sks(&once, SksPolicy::new(b).unwrap());
        prop_assert_eq!(twice, apply_sks(&s, SksPolicy::new(a * b).unwrap()));
    }

    #[test]
    fn mismatch_grows_with_extent(
        a in chunk_strategy(12, 1000),
        b in chunk_strategy(12, 1000),
        l in 1usize..20,
    ) {
        let lo = mismatch(&a, &b, l).unwrap();
        let hi = mismatch(&a, &b, l + 1).unwrap();
        prop_assert!(lo <= hi);
        prop_assert_eq!(mismatch(&a, &b, l).unwrap(), mismatch(&b, &a, l).unwrap());
    }

    #[test]
    fn deviant_average_nonnegative(chunks in prop::collection::vec(chunk_strategy(6, 500), 1..40)) {
        let mut store = MemoryStore::new(DlaConfig::default()).unwrap();
        for c in chunks {
            store.store_chunk(c);
        }
        prop_assert!(store.deviant_average().unwrap().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn identical_history_extrapolates_to_itself(c in chunk_strategy(8, 10_000), n in 1usize..30) {
        let mut store = MemoryStore::new(DlaConfig::default()).unwrap();
        for _ in 0..n {
            store.store_chunk(c.clone());
        }
        prop_assert_eq!(store.extrapolate().unwrap(), c);
    }

    #[test]
    fn permanence_counts_selections(
        stream in prop::collection::vec(chunk_strategy(3, 4), 2..80),
    ) {
        let cfg = DlaConfig { store_threshold: 1000, ..DlaConfig::default() };
        let mut store = MemoryStore::new(cfg).unwrap();
        let preds = store.run_episode(&stream).unwrap();
        prop_assert_eq!(preds.len(), stream.len() - 1);
        let total: f64 = store.chunks().map(|m| m.permanence).sum();
        prop_assert_eq!(total, preds.len() as f64);
        for p in &preds {
            prop_assert!(p.candidates.contains(&p.selected));
        }
    }

    #[test]
    fn replayed_stream_is_recalled_exactly(
        stream in prop::collection::vec(chunk_strategy(5, 50), 1..60),
    ) {
        let mut store = MemoryStore::new(DlaConfig::default()).unwrap();
        for c in &stream {
            store.store_chunk(c.clone());
        }
        let preds = store.run_episode(&stream).unwrap();
        prop_assert!(preds.iter().all(|p| p.mismatch_score == 0));
    }

    #[test]
    fn episodes_are_deterministic(
        stream in prop::collection::vec(chunk_strategy(4, 30), 1..100),
        threshold in 1usize..50,
        time_limit in 1usize..15,
    ) {
        let cfg = DlaConfig { store_threshold: threshold, time_limit, ..DlaConfig::default() };
        let a = MemoryStore::new(cfg.clone()).unwrap().run_episode(&stream).unwrap();
        let b = MemoryStore::new(cfg).unwrap().run_episode(&stream).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mapca_bounds_and_identity(
        pairs in prop::collection::vec((-100f64..100.0, -100f64..100.0), 1..200),
        tol in 1e-6f64..50.0,
    ) {
        let y = vec![pairs.iter().map(|p| p.0).collect::<Vec<_>>()];
        let yhat = vec![pairs.iter().map(|p| p.1).collect::<Vec<_>>()];
        let r = mapca(&y, &yhat, tol).unwrap();
        prop_assert!((0.0..=100.0).contains(&r.accuracy_percent));
        prop_assert_eq!(mapca(&y, &y, tol).unwrap().accuracy_percent, 100.0);
        let wider = mapca(&y, &yhat, tol * 2.0).unwrap();
        prop_assert!(wider.accuracy_percent >= r.accuracy_percent);
    }

    #[test]
    fn mapca_permutation_invariant(
        (pairs, shuffled) in prop::collection::vec((-5f64..5.0, -5f64..5.0), 1..100)
            .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
    ) {
        let split = |v: &[(f64, f64)]| {
            (vec![v.iter().map(|p| p.0).collect::<Vec<_>>()], vec![v.iter().map(|p| p.1).collect::<Vec<_>>()])
        };
        let (y, yhat) = split(&pairs);
        let (yp, yhp) = split(&shuffled);
        prop_assert_eq!(mapca(&y, &yhat, 0.7).unwrap().hits, mapca(&yp, &yhp, 0.7).unwrap().hits);
    }

    #[test]
    fn labels_are_self_consistent(
        rows in prop::collection::vec(prop::collection::vec(-100f64..100.0, 4), 1..30),
    ) {
        let exemplars: Vec<Exemplar> = rows
            .iter()
            .enumerate()
            .map(|(i, f)| Exemplar::new(format!("c{i}"), f.clone()).unwrap())
            .collect();
        let set = ExemplarSet::new(exemplars).unwrap();
        for (i, ex) in set.iter().enumerate() {
            // duplicates resolve to the earliest identical row
            let first = rows.iter().position(|r| r == &rows[i]).unwrap();
            prop_assert_eq!(assign_label(ex.features(), &set).unwrap(), format!("c{first}"));
        }
    }

    #[test]
    fn trend_csv_round_trip(
        steps in prop::collection::btree_set(0u64..10_000, 0..50),
        values in prop::collection::vec(any::<i64>(), 50),
    ) {
        let points: Vec<(u64, i64)> = steps.into_iter().zip(values).collect();
        let series = TrendSeries::new("t", points).unwrap();
        prop_assert_eq!(TrendSeries::parse_csv("t", &series.to_csv()).unwrap(), series);
    }
}
