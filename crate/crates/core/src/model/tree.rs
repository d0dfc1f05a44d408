use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{weighted_entropy, Label, ModelError};
use crate::features::FEATURE_COUNT;

/// Gains closer than this are treated as equal so that split selection does
/// not depend on rounding noise (for instance after rescaling class weights).
const GAIN_TOLERANCE: f64 = 1e-12;
/// Relative tolerance for leaf-mass ties.
const MASS_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedExample {
    pub values: [f64; FEATURE_COUNT],
    pub label: Label,
    pub weight: f64,
}

/// Summed sample weight per class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMass {
    pub bot: f64,
    pub human: f64,
}

impl ClassMass {
    fn add(&mut self, ex: &WeightedExample) {
        match ex.label {
            Label::Bot => self.bot += ex.weight,
            Label::Human => self.human += ex.weight,
        }
    }

    fn minus(&self, other: &ClassMass) -> ClassMass {
        ClassMass {
            bot: self.bot - other.bot,
            human: self.human - other.human,
        }
    }

    pub fn total(&self) -> f64 {
        self.bot + self.human
    }

    fn is_pure(&self) -> bool {
        self.bot <= 0.0 || self.human <= 0.0
    }

    fn entropy(&self) -> f64 {
        weighted_entropy(&[self.bot.max(0.0), self.human.max(0.0)]).unwrap_or(0.0)
    }

    /// Majority class by mass; near-ties resolve to bot.
    pub fn predicted(&self) -> Label {
        if self.bot >= self.human - MASS_TIE_TOLERANCE * self.total() {
            Label::Bot
        } else {
            Label::Human
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    /// `value <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf { mass: ClassMass, label: Label },
}

impl TreeNode {
    pub fn leaf(mass: ClassMass) -> Self {
        TreeNode::Leaf {
            mass,
            label: mass.predicted(),
        }
    }

    pub fn predict(&self, values: &[f64]) -> Label {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { label, .. } => return *label,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if values[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    pub(crate) fn max_feature_index(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split {
                feature, left, right, ..
            } => [Some(*feature), left.max_feature_index(), right.max_feature_index()]
                .into_iter()
                .flatten()
                .max(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    /// Features drawn at random at every node; values at or above the
    /// feature count disable subsampling.
    pub features_per_split: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Greedy top-down induction maximizing weighted information gain.
///
/// Equal gains resolve to the lowest feature index, then the smallest
/// threshold. Growth stops at `max_depth`, at pure nodes, and when no split
/// has positive gain.
pub fn train_tree<R: Rng + ?Sized>(
    examples: &[WeightedExample],
    params: &TreeParams,
    rng: &mut R,
) -> Result<TreeNode, ModelError> {
    if examples.is_empty() {
        return Err(ModelError::NoExamples);
    }
    if params.features_per_split == 0 {
        return Err(ModelError::InvalidParams("features_per_split must be at least 1".into()));
    }
    let indices: Vec<usize> = (0..examples.len()).collect();
    Ok(grow(examples, indices, 0, params, rng))
}

fn grow<R: Rng + ?Sized>(
    examples: &[WeightedExample],
    indices: Vec<usize>,
    depth: usize,
    params: &TreeParams,
    rng: &mut R,
) -> TreeNode {
    let mut mass = ClassMass::default();
    for &i in &indices {
        mass.add(&examples[i]);
    }
    if depth >= params.max_depth || mass.is_pure() {
        return TreeNode::leaf(mass);
    }

    let features = candidate_features(params.features_per_split, rng);
    let Some(split) = best_split(examples, &indices, &mass, &features) else {
        return TreeNode::leaf(mass);
    };

    let (left, right): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| examples[i].values[split.feature] <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow(examples, left, depth + 1, params, rng)),
        right: Box::new(grow(examples, right, depth + 1, params, rng)),
    }
}

fn candidate_features<R: Rng + ?Sized>(per_split: usize, rng: &mut R) -> Vec<usize> {
    if per_split >= FEATURE_COUNT {
        return (0..FEATURE_COUNT).collect();
    }
    let mut picked = rand::seq::index::sample(rng, FEATURE_COUNT, per_split).into_vec();
    picked.sort_unstable();
    picked
}

fn best_split(
    examples: &[WeightedExample],
    indices: &[usize],
    parent: &ClassMass,
    features: &[usize],
) -> Option<Split> {
    let parent_entropy = parent.entropy();
    let total = parent.total();
    let mut best: Option<Split> = None;

    for &feature in features {
        let mut order = indices.to_vec();
        order.sort_by(|&a, &b| {
            examples[a].values[feature]
                .partial_cmp(&examples[b].values[feature])
                .expect("finite feature values")
        });

        let mut left = ClassMass::default();
        for k in 0..order.len() - 1 {
            left.add(&examples[order[k]]);
            let here = examples[order[k]].values[feature];
            let next = examples[order[k + 1]].values[feature];
            if here == next {
                continue;
            }
            let right = parent.minus(&left);
            let gain = parent_entropy
                - (left.total() / total) * left.entropy()
                - (right.total() / total) * right.entropy();
            let floor = best.as_ref().map_or(0.0, |b| b.gain);
            if gain > floor + GAIN_TOLERANCE {
                let mid = here + (next - here) / 2.0;
                let threshold = if mid > here && mid < next { mid } else { here };
                best = Some(Split {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ex(values: [f64; 4], label: Label) -> WeightedExample {
        WeightedExample {
            values,
            label,
            weight: 1.0,
        }
    }

    fn full() -> TreeParams {
        TreeParams {
            max_depth: 10,
            features_per_split: 4,
        }
    }

    #[test]
    fn single_class_gives_single_leaf() {
        let data = vec![ex([1.0, 2.0, 3.0, 0.1], Label::Human); 5];
        let tree = train_tree(&data, &full(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.predict(&[0.0; 4]), Label::Human);
    }

    #[test]
    fn separable_feature_gives_depth_one() {
        let data: Vec<_> = (0..10)
            .map(|i| {
                let label = if i < 4 { Label::Bot } else { Label::Human };
                ex([50.0, 0.0, i as f64, 0.5], label)
            })
            .collect();
        let tree = train_tree(&data, &full(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(tree.depth(), 1);
        match &tree {
            TreeNode::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 2);
                assert_eq!(*threshold, 3.5);
            }
            _ => panic!("expected a split"),
        }
        assert!(data.iter().all(|e| tree.predict(&e.values) == e.label));
    }

    #[test]
    fn max_depth_zero_is_majority_leaf() {
        let data = vec![
            ex([1.0, 0.0, 0.0, 0.0], Label::Bot),
            ex([2.0, 0.0, 0.0, 0.0], Label::Human),
        ];
        let params = TreeParams {
            max_depth: 0,
            features_per_split: 4,
        };
        let tree = train_tree(&data, &params, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(tree.predict(&[9.0; 4]), Label::Bot);
    }

    #[test]
    fn leaf_tie_goes_to_bot() {
        let m = ClassMass {
            bot: 5.0,
            human: 9.0 * (100.0 / 180.0),
        };
        assert_eq!(m.predicted(), Label::Bot);
        let m = ClassMass {
            bot: 1.0,
            human: 1.5,
        };
        assert_eq!(m.predicted(), Label::Human);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(train_tree(&[], &full(), &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn equal_gain_prefers_lowest_feature() {
        // features 0 and 1 separate the classes identically
        let data = vec![
            ex([0.0, 0.0, 5.0, 5.0], Label::Bot),
            ex([0.0, 0.0, 5.0, 5.0], Label::Bot),
            ex([1.0, 1.0, 5.0, 5.0], Label::Human),
            ex([1.0, 1.0, 5.0, 5.0], Label::Human),
        ];
        let tree = train_tree(&data, &full(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(matches!(tree, TreeNode::Split { feature: 0, .. }));
    }
}
