use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{domain, EvalError};
use crate::model::{Label, LabeledExample};

fn class_indices(labels: &[Label], rng: &mut ChaCha8Rng) -> [Vec<usize>; 2] {
    let mut by_class = [Vec::new(), Vec::new()];
    for (i, l) in labels.iter().enumerate() {
        by_class[*l as usize].push(i);
    }
    for idx in &mut by_class {
        idx.shuffle(rng);
    }
    by_class
}

/// Stratified train/test split over labels, returning sorted index lists.
///
/// The test side receives `round(N·f)` items. The smaller class gets
/// `round(n_c·f)` of them and the larger class takes the remainder.
pub fn stratified_split_indices(
    labels: &[Label],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(domain(format!("test fraction {test_fraction} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let by_class = class_indices(labels, &mut rng);
    if by_class.iter().any(Vec::is_empty) {
        return Err(domain("stratified split needs both classes"));
    }

    let total_test = (labels.len() as f64 * test_fraction).round() as usize;
    let larger = if by_class[0].len() > by_class[1].len() { 0 } else { 1 };
    let smaller = 1 - larger;
    let mut n_test = [0; 2];
    n_test[smaller] =
        ((by_class[smaller].len() as f64 * test_fraction).round() as usize).min(by_class[smaller].len());
    n_test[larger] = total_test
        .saturating_sub(n_test[smaller])
        .min(by_class[larger].len());

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, idx) in by_class.iter().enumerate() {
        test.extend_from_slice(&idx[..n_test[c]]);
        train.extend_from_slice(&idx[n_test[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn stratified_split(
    examples: &[LabeledExample],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledExample>, Vec<LabeledExample>), EvalError> {
    let labels: Vec<Label> = examples.iter().map(|e| e.label).collect();
    let (train, test) = stratified_split_indices(&labels, test_fraction, seed)?;
    let pick = |idx: Vec<usize>| idx.into_iter().map(|i| examples[i].clone()).collect();
    Ok((pick(train), pick(test)))
}

/// Stratified k-fold partition of `0..labels.len()`.
///
/// Shuffled per-class index lists are concatenated and dealt round-robin,
/// so fold sizes differ by at most one and so do per-fold class counts.
pub fn stratified_kfold(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(domain(format!("k = {k}: cross-validation needs at least 2 folds")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let by_class = class_indices(labels, &mut rng);
    for (c, idx) in by_class.iter().enumerate() {
        if idx.len() < k {
            return Err(domain(format!(
                "class {} has {} members, fewer than k = {k}",
                Label::ALL[c],
                idx.len()
            )));
        }
    }
    let mut folds = vec![Vec::new(); k];
    for (pos, i) in by_class.iter().flatten().enumerate() {
        folds[pos % k].push(*i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(bots: usize, humans: usize) -> Vec<Label> {
        // interleave so positions carry no class information
        let mut v = Vec::new();
        let (mut b, mut h) = (bots, humans);
        while b + h > 0 {
            if b > 0 {
                v.push(Label::Bot);
                b -= 1;
            }
            for _ in 0..9 {
                if h > 0 {
                    v.push(Label::Human);
                    h -= 1;
                }
            }
        }
        v
    }

    fn count(labels: &[Label], idx: &[usize], l: Label) -> usize {
        idx.iter().filter(|&&i| labels[i] == l).count()
    }

    #[test]
    fn split_matches_reference_sizes() {
        let ls = labels(527, 4473);
        let (train, test) = stratified_split_indices(&ls, 0.4, 3).unwrap();
        assert_eq!(count(&ls, &test, Label::Bot), 211);
        assert_eq!(count(&ls, &test, Label::Human), 1789);
        assert_eq!(train.len() + test.len(), 5000);
    }

    #[test]
    fn split_balanced_small() {
        let ls = labels(5, 5);
        let (train, test) = stratified_split_indices(&ls, 0.5, 1).unwrap();
        for l in Label::ALL {
            let t = count(&ls, &test, l);
            assert!((2..=3).contains(&t));
            assert_eq!(t + count(&ls, &train, l), 5);
        }
    }

    #[test]
    fn split_is_seeded() {
        let ls = labels(30, 170);
        assert_eq!(
            stratified_split_indices(&ls, 0.3, 9).unwrap(),
            stratified_split_indices(&ls, 0.3, 9).unwrap()
        );
        assert_ne!(
            stratified_split_indices(&ls, 0.3, 9).unwrap(),
            stratified_split_indices(&ls, 0.3, 10).unwrap()
        );
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let ls = labels(5, 5);
        for f in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(stratified_split_indices(&ls, f, 0).is_err());
        }
    }

    #[test]
    fn kfold_exact_divisibility() {
        let ls = labels(10, 90);
        let folds = stratified_kfold(&ls, 10, 4).unwrap();
        for f in &folds {
            assert_eq!(count(&ls, f, Label::Bot), 1);
            assert_eq!(count(&ls, f, Label::Human), 9);
        }
    }

    #[test]
    fn kfold_errors_and_determinism() {
        assert!(stratified_kfold(&labels(10, 90), 1, 0).is_err());
        assert!(stratified_kfold(&labels(3, 90), 5, 0).is_err());
        let ls = labels(4, 16);
        assert!(stratified_kfold(&ls, 10, 0).is_err());
        assert_eq!(stratified_kfold(&ls, 4, 5).unwrap(), stratified_kfold(&ls, 4, 5).unwrap());
        let ls = labels(10, 10);
        assert_eq!(stratified_kfold(&ls, 10, 5).unwrap(), stratified_kfold(&ls, 10, 5).unwrap());
    }
}
