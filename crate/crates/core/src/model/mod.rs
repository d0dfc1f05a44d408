//! Cost-sensitive decision trees and random forests over the four account
//! features, plus the majority-class baseline.

mod forest;
mod tree;
mod zero_r;

pub use forest::{
    load_model, save_model, train_forest, train_forest_with_weights, ExtractionMetadata, ForestModel, ForestParams,
    Prediction, SplitCriterion, MODEL_FORMAT_VERSION, RNG_NAME,
};
pub use tree::{train_tree, ClassMass, TreeNode, TreeParams, WeightedExample};
pub use zero_r::{zero_r, ZeroR};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training data must contain both bots and humans")]
    MissingClass,
    #[error("training data is empty")]
    NoExamples,
    #[error("class mass must be positive")]
    ZeroMass,
    #[error("invalid hyperparameter: {0}")]
    InvalidParams(String),
    #[error("model feature schema {model:?} does not match {expected:?}")]
    SchemaMismatch {
        model: Vec<String>,
        expected: Vec<String>,
    },
    #[error("unsupported model format version {0:?}")]
    Version(String),
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Bot,
    Human,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Bot, Label::Human];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Bot => "bot",
            Label::Human => "human",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "bot" => Ok(Label::Bot),
            "human" => Ok(Label::Human),
            other => Err(format!("unknown label {other:?}, expected bot or human")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub label: Label,
}

/// Per-class sample weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub bot: f64,
    pub human: f64,
}

impl ClassWeights {
    pub fn of(&self, label: Label) -> f64 {
        match label {
            Label::Bot => self.bot,
            Label::Human => self.human,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            bot: self.bot * factor,
            human: self.human * factor,
        }
    }
}

/// Balanced weights `N / (2 · N_c)`.
pub fn compute_class_weights(labels: &[Label]) -> Result<ClassWeights, ModelError> {
    let bots = labels.iter().filter(|l| **l == Label::Bot).count();
    let humans = labels.len() - bots;
    if bots == 0 || humans == 0 {
        return Err(ModelError::MissingClass);
    }
    let n = labels.len() as f64;
    Ok(ClassWeights {
        bot: n / (2.0 * bots as f64),
        human: n / (2.0 * humans as f64),
    })
}

/// Shannon entropy in bits of the class distribution given by `class_mass`.
pub fn weighted_entropy<T: Real>(class_mass: &[T]) -> Result<T, ModelError> {
    let total = class_mass.iter().fold(T::zero(), |acc, &m| acc + m);
    if !(total > T::zero()) {
        return Err(ModelError::ZeroMass);
    }
    Ok(class_mass
        .iter()
        .filter(|&&m| m > T::zero())
        .map(|&m| {
            let p = m / total;
            -p * p.log2()
        })
        .fold(T::zero(), |acc, h| acc + h))
}
