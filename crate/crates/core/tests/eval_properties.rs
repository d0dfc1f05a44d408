use botgate_core::eval::{
    cliffs_delta, cohens_kappa, f1_by_comment_bins, mann_whitney_u, metrics_from_confusion, stratified_kfold,
    stratified_split_indices, BinRecord, ConfusionMatrix,
};
use botgate_core::model::Label;
use botgate_core::{ExactMetrics, Rational64};
use proptest::prelude::*;

fn labels(bots: usize, humans: usize) -> Vec<Label> {
    let mut l = vec![Label::Bot; bots];
    l.extend(vec![Label::Human; humans]);
    l
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn majority_baseline_metrics_are_exact() {
    // 10 bots, 90 humans, everything predicted human
    let cm = ConfusionMatrix {
        tp: 0,
        fn_: 10,
        fp: 0,
        tn: 90,
    };
    let m: ExactMetrics = metrics_from_confusion(&cm, 10, 90).unwrap();
    assert!(m.bot.precision_undefined);
    assert_eq!(m.bot.precision, r(0, 1));
    assert_eq!(m.human.precision, r(9, 10));
    assert_eq!(m.precision, r(81, 100));
    assert_eq!(m.recall, r(9, 10));
    assert_eq!(m.f1, r(2 * 81 * 9, 100 * (81 + 90)) * r(10, 1));
}

#[test]
fn split_sizes_for_a_skewed_population() {
    let l = labels(527, 4473);
    let (train, test) = stratified_split_indices(&l, 0.4, 7).unwrap();
    assert_eq!(test.len(), 2000);
    assert_eq!(train.len(), 3000);
    let test_bots = test.iter().filter(|&&i| l[i] == Label::Bot).count();
    assert_eq!((test_bots, test.len() - test_bots), (211, 1789));
}

#[test]
fn kfold_rejects_small_classes() {
    assert!(stratified_kfold(&labels(3, 50), 5, 0).is_err());
    assert!(stratified_kfold(&labels(10, 50), 1, 0).is_err());
}

/// U by direct pair counting: wins plus half ties.
fn u_by_pairs(x: &[f64], y: &[f64]) -> f64 {
    let mut u = 0.0;
    for a in x {
        for b in y {
            if a > b {
                u += 1.0;
            } else if a == b {
                u += 0.5;
            }
        }
    }
    u
}

#[test]
fn mann_whitney_p_value_reference() {
    // no ties, n1 = n2 = 8, complete separation but one swap
    let x: Vec<f64> = (1..=8).map(f64::from).collect();
    let y: Vec<f64> = [7.5, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0].to_vec();
    let t = mann_whitney_u(&x, &y).unwrap();
    assert_eq!(t.u, 1.0);
    // z = (|1 - 32| - 0.5) / sqrt(8*8*17/12)
    let z = 30.5 / (64.0f64 * 17.0 / 12.0).sqrt();
    assert!((t.z - z).abs() < 1e-12);
    assert!((t.p_value - 0.001_359_375_5).abs() < 1e-9, "{}", t.p_value);
}

fn label_strategy() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Bot), Just(Label::Human)]
}

proptest! {
    #[test]
    fn weighted_scores_recompute_from_confusion(tp in 0usize..50, fn_ in 0usize..50, fp in 0usize..50, tn in 0usize..50) {
        prop_assume!(tp + fn_ > 0 && fp + tn > 0);
        let cm = ConfusionMatrix { tp, fn_, fp, tn };
        let (bots, humans) = (tp + fn_, fp + tn);
        let m: ExactMetrics = metrics_from_confusion(&cm, bots, humans).unwrap();
        let ratio = |a: usize, b: usize| if b == 0 { r(0, 1) } else { r(a as i64, b as i64) };
        let n = (bots + humans) as i64;
        let p = (ratio(tp, tp + fp) * r(bots as i64, 1) + ratio(tn, tn + fn_) * r(humans as i64, 1)) / r(n, 1);
        let rc = (ratio(tp, bots) * r(bots as i64, 1) + ratio(tn, humans) * r(humans as i64, 1)) / r(n, 1);
        prop_assert_eq!(m.precision, p);
        prop_assert_eq!(m.recall, rc);
        // weighted recall is plain accuracy
        prop_assert_eq!(m.recall, r((tp + tn) as i64, n));
        if p + rc != r(0, 1) {
            prop_assert_eq!(m.f1, r(2, 1) * p * rc / (p + rc));
        }
        let f = m.to_f64();
        prop_assert!((0.0..=1.0).contains(&f.f1));
        prop_assert!(metrics_from_confusion::<f64>(&cm, bots + 1, humans).is_err());
    }

    #[test]
    fn kappa_is_symmetric(pairs in prop::collection::vec((0u8..3, 0u8..3), 1..60)) {
        let (a, b): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let k1 = cohens_kappa::<Rational64, _>(&a, &b).unwrap();
        let k2 = cohens_kappa::<Rational64, _>(&b, &a).unwrap();
        prop_assert_eq!(k1.kappa, k2.kappa);
        prop_assert!(k1.kappa <= r(1, 1));
    }

    #[test]
    fn cliffs_delta_is_antisymmetric(x in prop::collection::vec(0i32..20, 1..30), y in prop::collection::vec(0i32..20, 1..30)) {
        let dxy = cliffs_delta::<Rational64, _>(&x, &y).unwrap();
        let dyx = cliffs_delta::<Rational64, _>(&y, &x).unwrap();
        prop_assert_eq!(dxy.delta, -dyx.delta);
        prop_assert_eq!(dxy.magnitude, dyx.magnitude);
        prop_assert!(dxy.delta >= r(-1, 1) && dxy.delta <= r(1, 1));
    }

    #[test]
    fn mann_whitney_u_matches_pair_counting(x in prop::collection::vec(0u8..10, 1..25), y in prop::collection::vec(0u8..10, 1..25)) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let y: Vec<f64> = y.into_iter().map(f64::from).collect();
        let t = mann_whitney_u(&x, &y).unwrap();
        prop_assert_eq!(t.u, u_by_pairs(&x, &y));
        prop_assert_eq!(t.u + t.u_other, (x.len() * y.len()) as f64);
        prop_assert!((0.0..=1.0).contains(&t.p_value));
        let swapped = mann_whitney_u(&y, &x).unwrap();
        prop_assert!((swapped.p_value - t.p_value).abs() < 1e-12);
    }

    #[test]
    fn kfold_partitions_with_balanced_strata(bots in 5usize..40, humans in 5usize..200, k in 2usize..6, seed in any::<u64>()) {
        let l = labels(bots, humans);
        let folds = stratified_kfold(&l, k, seed).unwrap();
        let mut seen: Vec<usize> = folds.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..l.len()).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let fold_bots: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| l[i] == Label::Bot).count()).collect();
        prop_assert!(fold_bots.iter().max().unwrap() - fold_bots.iter().min().unwrap() <= 1);
    }

    #[test]
    fn split_is_stratified_and_disjoint(bots in 2usize..100, humans in 2usize..500, seed in any::<u64>()) {
        let l = labels(bots, humans);
        let (train, test) = stratified_split_indices(&l, 0.4, seed).unwrap();
        prop_assert_eq!(train.len() + test.len(), l.len());
        prop_assert!(train.iter().all(|i| test.binary_search(i).is_err()));
        prop_assert_eq!(test.len(), (l.len() as f64 * 0.4).round() as usize);
        let test_bots = test.iter().filter(|&&i| l[i] == Label::Bot).count();
        let smaller = bots.min(humans);
        let smaller_label = if bots <= humans { Label::Bot } else { Label::Human };
        let test_smaller = test.iter().filter(|&&i| l[i] == smaller_label).count();
        prop_assert_eq!(test_smaller, (smaller as f64 * 0.4).round() as usize);
        prop_assert!(test_bots <= bots);
    }

    #[test]
    fn bins_cover_every_record(records in prop::collection::vec((label_strategy(), label_strategy(), 0usize..60), 1..80)) {
        let recs: Vec<BinRecord> = records
            .iter()
            .map(|&(truth, predicted, n)| BinRecord { truth, predicted, non_empty_comments: n })
            .collect();
        let bins = f1_by_comment_bins(&recs, 5).unwrap();
        prop_assert_eq!(bins.iter().map(|b| b.population).sum::<usize>(), recs.len());
        for b in &bins {
            prop_assert_eq!(b.upper - b.lower, 4);
            prop_assert_eq!(b.lower % 5, 0);
            let inside = recs.iter().filter(|r| (b.lower..=b.upper).contains(&r.non_empty_comments)).count();
            prop_assert_eq!(inside, b.population);
        }
    }
}
