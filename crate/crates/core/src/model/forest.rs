use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{train_tree, TreeNode, TreeParams, WeightedExample};
use super::{compute_class_weights, ClassWeights, Label, LabeledExample, ModelError};
use crate::features::{FeatureVector, FEATURE_COUNT, FEATURE_SCHEMA};

pub const MODEL_FORMAT_VERSION: &str = "botgate-forest/1";
pub const RNG_NAME: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitCriterion {
    Entropy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub features_per_split: usize,
    pub bootstrap: bool,
    pub criterion: SplitCriterion,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 10,
            max_depth: 10,
            features_per_split: 2,
            bootstrap: true,
            criterion: SplitCriterion::Entropy,
        }
    }
}

impl ForestParams {
    /// A single tree on the full training set with every feature considered.
    pub fn decision_tree(max_depth: usize) -> Self {
        Self {
            n_trees: 1,
            max_depth,
            features_per_split: FEATURE_COUNT,
            bootstrap: false,
            criterion: SplitCriterion::Entropy,
        }
    }

    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            features_per_split: self.features_per_split,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.n_trees == 0 {
            return Err(ModelError::InvalidParams("n_trees must be at least 1".into()));
        }
        if self.features_per_split == 0 {
            return Err(ModelError::InvalidParams("features_per_split must be at least 1".into()));
        }
        Ok(())
    }
}

/// Feature-extraction settings the model was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionMetadata {
    pub eps: f64,
    pub min_samples: usize,
    pub max_levenshtein_chars: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestModel {
    pub format_version: String,
    pub feature_schema: Vec<String>,
    pub params: ForestParams,
    pub seed: u64,
    pub rng: String,
    pub class_weights: ClassWeights,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction: Option<ExtractionMetadata>,
    pub trees: Vec<TreeNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    /// Fraction of trees voting bot.
    pub score: f64,
}

pub fn train_forest(
    examples: &[LabeledExample],
    params: &ForestParams,
    seed: u64,
) -> Result<ForestModel, ModelError> {
    let labels: Vec<Label> = examples.iter().map(|e| e.label).collect();
    let weights = compute_class_weights(&labels)?;
    train_forest_with_weights(examples, params, seed, weights)
}

/// Trains with explicit class weights. Tree `t` draws from its own ChaCha8
/// stream `t` of `seed`, so the result does not depend on thread scheduling.
pub fn train_forest_with_weights(
    examples: &[LabeledExample],
    params: &ForestParams,
    seed: u64,
    class_weights: ClassWeights,
) -> Result<ForestModel, ModelError> {
    params.validate()?;
    if examples.len() < 2 {
        return Err(ModelError::NoExamples);
    }
    if !Label::ALL
        .iter()
        .all(|l| examples.iter().any(|e| e.label == *l))
    {
        return Err(ModelError::MissingClass);
    }
    let weighted: Vec<WeightedExample> = examples
        .iter()
        .map(|e| WeightedExample {
            values: e.features.values(),
            label: e.label,
            weight: class_weights.of(e.label),
        })
        .collect();

    let tree_params = params.tree_params();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            if params.bootstrap {
                let n = weighted.len();
                let sample: Vec<WeightedExample> =
                    (0..n).map(|_| weighted[rng.random_range(0..n)]).collect();
                train_tree(&sample, &tree_params, &mut rng)
            } else {
                train_tree(&weighted, &tree_params, &mut rng)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ForestModel {
        format_version: MODEL_FORMAT_VERSION.to_string(),
        feature_schema: FEATURE_SCHEMA.iter().map(|s| s.to_string()).collect(),
        params: params.clone(),
        seed,
        rng: RNG_NAME.to_string(),
        class_weights,
        extraction: None,
        trees,
    })
}

impl ForestModel {
    pub fn check_schema(&self) -> Result<(), ModelError> {
        if self.feature_schema.iter().map(String::as_str).eq(FEATURE_SCHEMA) {
            Ok(())
        } else {
            Err(ModelError::SchemaMismatch {
                model: self.feature_schema.clone(),
                expected: FEATURE_SCHEMA.iter().map(|s| s.to_string()).collect(),
            })
        }
    }

    pub fn predict(&self, features: &FeatureVector) -> Result<Prediction, ModelError> {
        self.check_schema()?;
        Ok(self.predict_values(&features.values()))
    }

    /// Majority vote; a tied vote is a bot.
    pub fn predict_values(&self, values: &[f64; FEATURE_COUNT]) -> Prediction {
        let votes = self
            .trees
            .iter()
            .filter(|t| t.predict(values) == Label::Bot)
            .count();
        let n = self.trees.len();
        Prediction {
            label: if 2 * votes >= n { Label::Bot } else { Label::Human },
            score: votes as f64 / n as f64,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::Corrupt(e.to_string()))?;
        match value.get("format_version").and_then(|v| v.as_str()) {
            Some(MODEL_FORMAT_VERSION) => {}
            Some(other) => return Err(ModelError::Version(other.to_string())),
            None => return Err(ModelError::Corrupt("missing format_version".into())),
        }
        let model: ForestModel =
            serde_json::from_value(value).map_err(|e| ModelError::Corrupt(e.to_string()))?;
        model.validate_structure()?;
        Ok(model)
    }

    fn validate_structure(&self) -> Result<(), ModelError> {
        if self.trees.len() != self.params.n_trees {
            return Err(ModelError::Corrupt(format!(
                "expected {} trees, found {}",
                self.params.n_trees,
                self.trees.len()
            )));
        }
        for (i, t) in self.trees.iter().enumerate() {
            if t.depth() > self.params.max_depth {
                return Err(ModelError::Corrupt(format!("tree {i} exceeds max_depth")));
            }
            if t.max_feature_index().is_some_and(|f| f >= self.feature_schema.len()) {
                return Err(ModelError::Corrupt(format!("tree {i} uses an unknown feature")));
            }
        }
        Ok(())
    }
}

pub fn save_model(model: &ForestModel, path: impl AsRef<Path>) -> Result<(), ModelError> {
    fs::write(path, model.to_json())?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ForestModel, ModelError> {
    ForestModel::from_json(&fs::read_to_string(path)?)
}
