use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{metrics_from_confusion, ConfusionMatrix, MetricsReport};
use super::split::stratified_kfold;
use super::{domain, EvalError};
use crate::model::{train_forest, zero_r, ForestModel, ForestParams, Label, LabeledExample, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClassifierConfig {
    RandomForest {
        n_trees: usize,
        max_depth: usize,
        features_per_split: usize,
    },
    DecisionTree {
        max_depth: usize,
    },
    ZeroR,
}

impl ClassifierConfig {
    /// (trees, depth), used to prefer simpler models on ties.
    fn complexity(&self) -> (usize, usize) {
        match self {
            ClassifierConfig::RandomForest {
                n_trees, max_depth, ..
            } => (*n_trees, *max_depth),
            ClassifierConfig::DecisionTree { max_depth } => (1, *max_depth),
            ClassifierConfig::ZeroR => (0, 0),
        }
    }

    pub fn forest_params(&self) -> Option<ForestParams> {
        match *self {
            ClassifierConfig::RandomForest {
                n_trees,
                max_depth,
                features_per_split,
            } => Some(ForestParams {
                n_trees,
                max_depth,
                features_per_split,
                ..ForestParams::default()
            }),
            ClassifierConfig::DecisionTree { max_depth } => Some(ForestParams::decision_tree(max_depth)),
            ClassifierConfig::ZeroR => None,
        }
    }
}

impl fmt::Display for ClassifierConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierConfig::RandomForest {
                n_trees,
                max_depth,
                features_per_split,
            } => write!(
                f,
                "random_forest(n_trees={n_trees}, max_depth={max_depth}, features_per_split={features_per_split})"
            ),
            ClassifierConfig::DecisionTree { max_depth } => write!(f, "decision_tree(max_depth={max_depth})"),
            ClassifierConfig::ZeroR => f.write_str("zero_r"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomForestGrid {
    pub n_trees: Vec<usize>,
    pub max_depth: Vec<usize>,
    pub features_per_split: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTreeGrid {
    pub max_depth: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default)]
    pub random_forest: Option<RandomForestGrid>,
    #[serde(default)]
    pub decision_tree: Option<DecisionTreeGrid>,
    #[serde(default)]
    pub zero_r: bool,
    pub k: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            random_forest: Some(RandomForestGrid {
                n_trees: vec![5, 10, 20],
                max_depth: vec![5, 10],
                features_per_split: vec![2, 4],
            }),
            decision_tree: Some(DecisionTreeGrid {
                max_depth: vec![3, 5, 10],
            }),
            zero_r: true,
            k: 10,
            seed: 0,
        }
    }
}

impl GridSpec {
    pub fn configurations(&self) -> Result<Vec<ClassifierConfig>, EvalError> {
        let mut out = Vec::new();
        if let Some(rf) = &self.random_forest {
            if rf.n_trees.is_empty() || rf.max_depth.is_empty() || rf.features_per_split.is_empty() {
                return Err(domain("random_forest grid has an empty value list"));
            }
            for &n_trees in &rf.n_trees {
                for &max_depth in &rf.max_depth {
                    for &features_per_split in &rf.features_per_split {
                        out.push(ClassifierConfig::RandomForest {
                            n_trees,
                            max_depth,
                            features_per_split,
                        });
                    }
                }
            }
        }
        if let Some(dt) = &self.decision_tree {
            if dt.max_depth.is_empty() {
                return Err(domain("decision_tree grid has an empty value list"));
            }
            out.extend(dt.max_depth.iter().map(|&max_depth| ClassifierConfig::DecisionTree { max_depth }));
        }
        if self.zero_r {
            out.push(ClassifierConfig::ZeroR);
        }
        if out.is_empty() {
            return Err(domain("grid contains no configuration"));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigScore {
    pub config: ClassifierConfig,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
    pub mean_bot_recall: f64,
    pub folds: Vec<MetricsReport<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    /// Best first: mean F1, then mean bot recall, then fewer trees and
    /// shallower depth.
    pub ranked: Vec<ConfigScore>,
    pub k: usize,
    pub seed: u64,
}

impl GridSearchResult {
    pub fn best(&self) -> &ConfigScore {
        &self.ranked[0]
    }
}

/// Trains `config` on `examples`. ZeroR is returned as a one-leaf forest.
pub fn fit_config(
    config: &ClassifierConfig,
    examples: &[LabeledExample],
    seed: u64,
) -> Result<ForestModel, ModelError> {
    match config.forest_params() {
        Some(params) => train_forest(examples, &params, seed),
        None => {
            let labels: Vec<Label> = examples.iter().map(|e| e.label).collect();
            Ok(zero_r(&labels)?.to_model())
        }
    }
}

fn score_config(
    config: &ClassifierConfig,
    examples: &[LabeledExample],
    folds: &[Vec<usize>],
    seed: u64,
) -> Result<ConfigScore, EvalError> {
    let mut in_fold = vec![0; examples.len()];
    for (f, idx) in folds.iter().enumerate() {
        for &i in idx {
            in_fold[i] = f;
        }
    }
    let mut reports = Vec::with_capacity(folds.len());
    for (f, held_out) in folds.iter().enumerate() {
        let train: Vec<LabeledExample> = examples
            .iter()
            .zip(&in_fold)
            .filter(|(_, fold)| **fold != f)
            .map(|(e, _)| e.clone())
            .collect();
        let model = fit_config(config, &train, seed).map_err(|source| EvalError::Config {
            config: config.to_string(),
            source,
        })?;
        let cm = ConfusionMatrix::from_pairs(held_out.iter().map(|&i| {
            let e = &examples[i];
            (e.label, model.predict_values(&e.features.values()).label)
        }));
        reports.push(metrics_from_confusion::<f64>(&cm, cm.bots(), cm.humans())?);
    }
    let mean = |f: fn(&MetricsReport<f64>) -> f64| reports.iter().map(f).sum::<f64>() / reports.len() as f64;
    Ok(ConfigScore {
        config: config.clone(),
        mean_precision: mean(|r| r.precision),
        mean_recall: mean(|r| r.recall),
        mean_f1: mean(|r| r.f1),
        mean_bot_recall: mean(|r| r.bot.recall),
        folds: reports,
    })
}

/// Stratified k-fold cross-validation of every configuration in `grid`.
/// Only `train` is ever seen.
pub fn grid_search_cv(train: &[LabeledExample], grid: &GridSpec) -> Result<GridSearchResult, EvalError> {
    let configs = grid.configurations()?;
    let labels: Vec<Label> = train.iter().map(|e| e.label).collect();
    let folds = stratified_kfold(&labels, grid.k, grid.seed)?;

    let mut ranked = configs
        .par_iter()
        .map(|c| score_config(c, train, &folds, grid.seed))
        .collect::<Result<Vec<_>, _>>()?;
    ranked.sort_by(|a, b| {
        b.mean_f1
            .partial_cmp(&a.mean_f1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                b.mean_bot_recall
                    .partial_cmp(&a.mean_bot_recall)
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| a.config.complexity().cmp(&b.config.complexity()))
    });
    Ok(GridSearchResult {
        ranked,
        k: grid.k,
        seed: grid.seed,
    })
}
