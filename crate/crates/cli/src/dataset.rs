//! Labeled feature sets, including the bundled synthetic one.

use std::collections::BTreeMap;

use botgate_core::corpus::synthetic::{generate, SyntheticConfig};
use botgate_core::corpus::{group_and_filter, CorpusFilter, RawComment};
use botgate_core::eval::GridSpec;
use botgate_core::features::{extract_features_batch, write_features_csv, ExtractionParams, FeatureVector};
use botgate_core::model::{Label, LabeledExample};

use crate::error::CliError;
use crate::train::TrainOptions;

/// Seed of the bundled synthetic corpus and of the reference training run.
pub const REFERENCE_SEED: u64 = 20_220_401;

/// Pairs features with labels. Accounts without a label are returned
/// separately, in order.
pub fn attach_labels(
    features: Vec<FeatureVector>,
    labels: &BTreeMap<String, Label>,
) -> (Vec<LabeledExample>, Vec<String>) {
    let mut labeled = Vec::new();
    let mut unlabeled = Vec::new();
    for fv in features {
        match labels.get(&fv.account) {
            Some(&label) => labeled.push(LabeledExample { features: fv, label }),
            None => unlabeled.push(fv.account),
        }
    }
    (labeled, unlabeled)
}

/// Features of every account passing `filter`, in account order.
pub fn features_of(
    comments: &[RawComment],
    filter: &CorpusFilter,
    params: &ExtractionParams,
) -> Result<Vec<FeatureVector>, CliError> {
    Ok(extract_features_batch(&group_and_filter(comments, filter), params)?)
}

pub fn reference_corpus_config() -> SyntheticConfig {
    SyntheticConfig {
        seed: REFERENCE_SEED,
        ..SyntheticConfig::default()
    }
}

/// Labeled features of the synthetic corpus under default settings.
pub fn synthetic_examples(config: &SyntheticConfig) -> Result<Vec<LabeledExample>, CliError> {
    let corpus = generate(config);
    let features = features_of(&corpus.comments, &CorpusFilter::default(), &ExtractionParams::default())?;
    let (labeled, unlabeled) = attach_labels(features, &corpus.labels);
    debug_assert!(unlabeled.is_empty());
    Ok(labeled)
}

pub fn labeled_csv(examples: &[LabeledExample]) -> Result<String, CliError> {
    let rows: Vec<FeatureVector> = examples.iter().map(|e| e.features.clone()).collect();
    let labels: Vec<Label> = examples.iter().map(|e| e.label).collect();
    let mut buf = Vec::new();
    write_features_csv(&mut buf, &rows, Some(&labels))?;
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

/// Settings of `botgate train` when no option is given.
pub fn default_train_options() -> TrainOptions {
    TrainOptions {
        test_fraction: 0.4,
        grid: GridSpec {
            seed: REFERENCE_SEED,
            ..GridSpec::default()
        },
        bin_width: 5,
        extraction: ExtractionParams::default().metadata(),
    }
}
