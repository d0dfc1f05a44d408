use serde::{Deserialize, Serialize};

use super::forest::{ForestModel, ForestParams, MODEL_FORMAT_VERSION, RNG_NAME};
use super::tree::{ClassMass, TreeNode};
use super::{ClassWeights, Label, ModelError};
use crate::features::{FeatureVector, FEATURE_SCHEMA};

/// Baseline that always answers the majority training label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroR {
    label: Label,
    bots: usize,
    humans: usize,
}

/// Majority label of `train_labels`; a tie is a bot.
pub fn zero_r(train_labels: &[Label]) -> Result<ZeroR, ModelError> {
    if train_labels.is_empty() {
        return Err(ModelError::NoExamples);
    }
    let bots = train_labels.iter().filter(|l| **l == Label::Bot).count();
    let humans = train_labels.len() - bots;
    Ok(ZeroR {
        label: if bots >= humans { Label::Bot } else { Label::Human },
        bots,
        humans,
    })
}

impl ZeroR {
    pub fn label(&self) -> Label {
        self.label
    }

    pub fn predict(&self, _features: &FeatureVector) -> Label {
        self.label
    }

    /// The same classifier as a one-leaf forest, so it can be saved and
    /// applied like any other model.
    pub fn to_model(&self) -> ForestModel {
        ForestModel {
            format_version: MODEL_FORMAT_VERSION.to_string(),
            feature_schema: FEATURE_SCHEMA.iter().map(|s| s.to_string()).collect(),
            params: ForestParams::decision_tree(0),
            seed: 0,
            rng: RNG_NAME.to_string(),
            class_weights: ClassWeights {
                bot: 1.0,
                human: 1.0,
            },
            extraction: None,
            trees: vec![TreeNode::Leaf {
                mass: ClassMass {
                    bot: self.bots as f64,
                    human: self.humans as f64,
                },
                label: self.label,
            }],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_and_ties() {
        let mut labels = vec![Label::Human; 893];
        labels.extend(vec![Label::Bot; 107]);
        assert_eq!(zero_r(&labels).unwrap().label(), Label::Human);
        assert_eq!(zero_r(&[Label::Bot; 3]).unwrap().label(), Label::Bot);
        assert_eq!(zero_r(&[Label::Bot, Label::Human]).unwrap().label(), Label::Bot);
        assert!(zero_r(&[]).is_err());
    }

    #[test]
    fn model_form_predicts_the_same() {
        let z = zero_r(&[Label::Human, Label::Human, Label::Bot]).unwrap();
        let m = z.to_model();
        let fv = FeatureVector {
            account: "x".into(),
            total_comments: 10,
            empty_comments: 0,
            pattern_count: 1,
            gini_patterns: 0.0,
        };
        assert_eq!(m.predict(&fv).unwrap().label, z.predict(&fv));
        assert_eq!(ForestModel::from_json(&m.to_json()).unwrap(), m);
    }
}
