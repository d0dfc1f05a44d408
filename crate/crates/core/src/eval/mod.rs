//! Evaluation protocol: stratified splitting, cross-validated grid search,
//! precision/recall/F1 with class-size weighting, and the nonparametric
//! statistics used to compare bots and humans.

mod bins;
mod grid;
mod metrics;
mod split;
mod stats;

pub use bins::{f1_by_comment_bins, BinRecord, BinReport};
pub use grid::{
    fit_config, grid_search_cv, ClassifierConfig, ConfigScore, DecisionTreeGrid, GridSearchResult,
    GridSpec, RandomForestGrid,
};
pub use metrics::{metrics_from_confusion, ClassMetrics, ConfusionMatrix, MetricsReport};
pub use split::{stratified_kfold, stratified_split, stratified_split_indices};
pub use stats::{
    cliffs_delta, cohens_kappa, mann_whitney_u, CliffsDelta, EffectMagnitude, Kappa, MannWhitney,
};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{0}")]
    Domain(String),
    #[error("configuration {config}: {source}")]
    Config {
        config: String,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) fn domain(msg: impl Into<String>) -> EvalError {
    EvalError::Domain(msg.into())
}
