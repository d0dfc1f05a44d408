use botgate_core::features::FeatureVector;
use botgate_core::model::{
    compute_class_weights, train_forest, train_tree, weighted_entropy, zero_r, ForestModel, ForestParams, Label,
    LabeledExample, TreeNode, TreeParams, WeightedExample,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entropy_bits(bot: f64, human: f64) -> f64 {
    let total = bot + human;
    [bot, human]
        .iter()
        .filter(|m| **m > 0.0)
        .map(|m| {
            let p = m / total;
            -p * p.log2()
        })
        .sum()
}

/// Every (feature, midpoint) candidate with its gain, scanned exhaustively.
fn brute_force_root(examples: &[WeightedExample]) -> Option<(usize, f64, f64)> {
    let mass = |pred: &dyn Fn(&WeightedExample) -> bool| {
        examples.iter().filter(|e| pred(e)).fold((0.0, 0.0), |(b, h), e| match e.label {
            Label::Bot => (b + e.weight, h),
            Label::Human => (b, h + e.weight),
        })
    };
    let (pb, ph) = mass(&|_| true);
    let parent = entropy_bits(pb, ph);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..4 {
        let mut vals: Vec<f64> = examples.iter().map(|e| e.values[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (lb, lh) = mass(&|e| e.values[f] <= t);
            let (rb, rh) = (pb - lb, ph - lh);
            let total = pb + ph;
            let gain = parent
                - (lb + lh) / total * entropy_bits(lb, lh)
                - (rb + rh) / total * entropy_bits(rb, rh);
            if best.is_none_or(|(_, _, g)| gain > g + 1e-12) {
                best = Some((f, t, gain));
            }
        }
    }
    best.filter(|(_, _, g)| *g > 1e-12)
}

fn example(values: [f64; 4], label: Label, weight: f64) -> WeightedExample {
    WeightedExample { values, label, weight }
}

fn labeled(i: usize, values: [usize; 3], gini: f64, label: Label) -> LabeledExample {
    LabeledExample {
        features: FeatureVector {
            account: format!("a{i}"),
            total_comments: values[0],
            empty_comments: values[1],
            pattern_count: values[2],
            gini_patterns: gini,
        },
        label,
    }
}

#[test]
fn root_split_of_eight_examples_matches_enumeration() {
    let data = vec![
        example([10.0, 0.0, 2.0, 0.7], Label::Bot, 4.0),
        example([12.0, 1.0, 1.0, 0.0], Label::Bot, 4.0),
        example([30.0, 2.0, 3.0, 0.6], Label::Bot, 4.0),
        example([11.0, 0.0, 9.0, 0.1], Label::Human, 4.0 / 7.0),
        example([25.0, 5.0, 14.0, 0.2], Label::Human, 4.0 / 7.0),
        example([40.0, 1.0, 30.0, 0.05], Label::Human, 4.0 / 7.0),
        example([18.0, 0.0, 2.0, 0.3], Label::Human, 4.0 / 7.0),
        example([22.0, 3.0, 17.0, 0.15], Label::Human, 4.0 / 7.0),
    ];
    let tree = train_tree(
        &data,
        &TreeParams {
            max_depth: 1,
            features_per_split: 4,
        },
        &mut ChaCha8Rng::seed_from_u64(0),
    )
    .unwrap();
    let (feature, threshold, _) = brute_force_root(&data).unwrap();
    match tree {
        TreeNode::Split {
            feature: f,
            threshold: t,
            ..
        } => assert_eq!((f, t), (feature, threshold)),
        leaf => panic!("expected a split, got {leaf:?}"),
    }
}

#[test]
fn random_root_splits_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.random_range(2..=12);
        let data: Vec<WeightedExample> = (0..n)
            .map(|_| {
                example(
                    [
                        f64::from(rng.random_range(0u8..6)),
                        f64::from(rng.random_range(0u8..6)),
                        f64::from(rng.random_range(0u8..6)),
                        f64::from(rng.random_range(0u8..6)) / 5.0,
                    ],
                    if rng.random_bool(0.4) { Label::Bot } else { Label::Human },
                    f64::from(rng.random_range(1u8..4)),
                )
            })
            .collect();
        let tree = train_tree(
            &data,
            &TreeParams {
                max_depth: 1,
                features_per_split: 4,
            },
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        match (tree, brute_force_root(&data)) {
            (TreeNode::Split { feature, threshold, .. }, Some((f, t, _))) => {
                assert_eq!((feature, threshold), (f, t), "{data:?}")
            }
            (TreeNode::Leaf { .. }, None) => {}
            (tree, oracle) => panic!("tree {tree:?} vs oracle {oracle:?} on {data:?}"),
        }
    }
}

#[test]
fn balanced_weights_equalize_class_mass() {
    let mut labels = vec![Label::Bot; 527];
    labels.extend(vec![Label::Human; 4473]);
    let w = compute_class_weights(&labels).unwrap();
    assert!((w.bot * 527.0 - w.human * 4473.0).abs() < 1e-9);
    assert!((w.bot * 527.0 - 2500.0).abs() < 1e-9);
}

#[test]
fn entropy_reference_values() {
    assert_eq!(weighted_entropy(&[1.0f64, 1.0]).unwrap(), 1.0);
    assert_eq!(weighted_entropy(&[3.0f64, 0.0]).unwrap(), 0.0);
    assert!((weighted_entropy(&[1.0f64, 3.0]).unwrap() - 0.811_278_124_459_132_9).abs() < 1e-12);
    assert!(weighted_entropy(&[0.0f64, 0.0]).is_err());
}

fn separable(n: usize, seed: u64) -> Vec<LabeledExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            if i % 9 == 0 {
                let total = rng.random_range(10..60);
                labeled(i, [total, rng.random_range(0..3), rng.random_range(1..4)], rng.random_range(0.4..0.9), Label::Bot)
            } else {
                let total = rng.random_range(10..60);
                labeled(i, [total, rng.random_range(0..5), total - rng.random_range(0..4)], rng.random_range(0.0..0.1), Label::Human)
            }
        })
        .collect()
}

#[test]
fn forest_training_is_reproducible_and_serializes_byte_identically() {
    let data = separable(120, 1);
    let a = train_forest(&data, &ForestParams::default(), 42).unwrap();
    let b = train_forest(&data, &ForestParams::default(), 42).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(ForestModel::from_json(&a.to_json()).unwrap().to_json(), a.to_json());
    let c = train_forest(&data, &ForestParams::default(), 43).unwrap();
    assert_ne!(a.to_json(), c.to_json());
    for e in &data {
        assert_eq!(a.predict(&e.features).unwrap().label, e.label);
    }
}

#[test]
fn zero_r_model_predicts_the_majority() {
    let data = separable(90, 2);
    let labels: Vec<Label> = data.iter().map(|e| e.label).collect();
    let z = zero_r(&labels).unwrap();
    assert_eq!(z.label(), Label::Human);
    let model = z.to_model();
    for e in &data {
        assert_eq!(model.predict(&e.features).unwrap().label, Label::Human);
    }
    assert_eq!(zero_r(&[Label::Bot, Label::Human]).unwrap().label(), Label::Bot);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn uniform_weight_scaling_leaves_trees_unchanged(seed in any::<u64>(), factor in 1u32..20) {
        let data = separable(60, seed);
        let labels: Vec<Label> = data.iter().map(|e| e.label).collect();
        let w = compute_class_weights(&labels).unwrap();
        let params = ForestParams { n_trees: 3, ..ForestParams::default() };
        let base = botgate_core::model::train_forest_with_weights(&data, &params, seed, w).unwrap();
        let scaled = botgate_core::model::train_forest_with_weights(&data, &params, seed, w.scaled(f64::from(factor))).unwrap();
        for (ta, tb) in base.trees.iter().zip(&scaled.trees) {
            prop_assert_eq!(structure(ta), structure(tb));
        }
    }

    #[test]
    fn weights_are_positive_and_balance(bots in 1usize..200, humans in 1usize..2000) {
        let mut labels = vec![Label::Bot; bots];
        labels.extend(vec![Label::Human; humans]);
        let w = compute_class_weights(&labels).unwrap();
        prop_assert!(w.bot > 0.0 && w.human > 0.0);
        let n = (bots + humans) as f64;
        prop_assert!((w.bot * bots as f64 - n / 2.0).abs() < 1e-9 * n);
        prop_assert!((w.human * humans as f64 - n / 2.0).abs() < 1e-9 * n);
    }
}

/// Tree shape with split points, ignoring leaf masses.
fn structure(node: &TreeNode) -> String {
    match node {
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } => format!("({feature}<={threshold} {} {})", structure(left), structure(right)),
        TreeNode::Leaf { label, .. } => label.to_string(),
    }
}
