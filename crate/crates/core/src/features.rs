//! The four per-account model features and their CSV interchange format.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{is_empty_comment, AccountActivity};
use crate::model::{ExtractionMetadata, Label, LabeledExample};
use crate::patterns::{cluster_comments, gini, pattern_sizes, ClusteringParams, PatternAssignment};
use crate::textsim::{pairwise_distances_with, DistanceOptions};

pub const FEATURE_COUNT: usize = 4;

/// Column order of the feature vector, recorded in every model file.
pub const FEATURE_SCHEMA: [&str; FEATURE_COUNT] =
    ["total_comments", "empty_comments", "pattern_count", "gini_patterns"];

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("account {0} has no comments")]
    NoComments(String),
    #[error("feature extraction failed for {} account(s): {}", .0.len(), summarize(.0))]
    Batch(Vec<(String, FeatureError)>),
    #[error("feature CSV columns {found:?} do not match {expected:?}")]
    SchemaMismatch {
        found: Vec<String>,
        expected: Vec<String>,
    },
    #[error("feature CSV row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("feature CSV has no label column")]
    MissingLabels,
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn summarize(failures: &[(String, FeatureError)]) -> String {
    failures
        .iter()
        .map(|(a, e)| format!("{a}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub account: String,
    pub total_comments: usize,
    pub empty_comments: usize,
    pub pattern_count: usize,
    pub gini_patterns: f64,
}

impl FeatureVector {
    /// Values in [`FEATURE_SCHEMA`] order.
    pub fn values(&self) -> [f64; FEATURE_COUNT] {
        [
            self.total_comments as f64,
            self.empty_comments as f64,
            self.pattern_count as f64,
            self.gini_patterns,
        ]
    }

    pub fn non_empty_comments(&self) -> usize {
        self.total_comments - self.empty_comments
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtractionParams {
    pub clustering: ClusteringParams<f64>,
    pub distance: DistanceOptions,
}

impl ExtractionParams {
    pub fn metadata(&self) -> ExtractionMetadata {
        ExtractionMetadata {
            eps: self.clustering.eps(),
            min_samples: self.clustering.min_samples(),
            max_levenshtein_chars: self.distance.max_levenshtein_chars,
        }
    }
}

impl From<ClusteringParams<f64>> for ExtractionParams {
    fn from(clustering: ClusteringParams<f64>) -> Self {
        Self {
            clustering,
            ..Self::default()
        }
    }
}

/// Features together with the pattern assignment they were derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct AccountAnalysis {
    pub features: FeatureVector,
    pub assignment: PatternAssignment,
}

pub fn analyze_account(
    activity: &AccountActivity,
    params: &ExtractionParams,
) -> Result<AccountAnalysis, FeatureError> {
    // whitespace-only bodies are compared as the empty text, so all empty
    // comments of an account fall into a single pattern
    let bodies: Vec<&str> = activity
        .bodies()
        .map(|b| if is_empty_comment(b) { "" } else { b })
        .collect();
    if bodies.is_empty() {
        return Err(FeatureError::NoComments(activity.account().to_string()));
    }
    let distances = pairwise_distances_with::<f64, _>(&bodies, &params.distance)
        .map_err(|_| FeatureError::NoComments(activity.account().to_string()))?;
    let assignment = cluster_comments(&distances, &params.clustering);
    let sizes: Vec<f64> = pattern_sizes(&assignment).into_iter().map(|s| s as f64).collect();
    let gini_patterns = gini(&sizes).expect("pattern sizes are positive");
    let features = FeatureVector {
        account: activity.account().to_string(),
        total_comments: bodies.len(),
        empty_comments: bodies.iter().filter(|b| is_empty_comment(b)).count(),
        pattern_count: assignment.pattern_count(),
        gini_patterns,
    };
    Ok(AccountAnalysis {
        features,
        assignment,
    })
}

pub fn extract_features(
    activity: &AccountActivity,
    params: &ExtractionParams,
) -> Result<FeatureVector, FeatureError> {
    analyze_account(activity, params).map(|a| a.features)
}

/// Order-preserving parallel map of [`extract_features`]. Failures from
/// every account are collected into one error.
pub fn extract_features_batch(
    accounts: &[AccountActivity],
    params: &ExtractionParams,
) -> Result<Vec<FeatureVector>, FeatureError> {
    let results: Vec<_> = accounts
        .par_iter()
        .map(|a| extract_features(a, params))
        .collect();
    let mut out = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (acct, r) in accounts.iter().zip(results) {
        match r {
            Ok(fv) => out.push(fv),
            Err(e) => failures.push((acct.account().to_string(), e)),
        }
    }
    if failures.is_empty() {
        Ok(out)
    } else {
        Err(FeatureError::Batch(failures))
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    account: String,
    total_comments: usize,
    empty_comments: usize,
    pattern_count: usize,
    gini_patterns: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<Label>,
}

/// Writes the feature CSV; a trailing `label` column is added when labels
/// are given (one per row).
pub fn write_features_csv(
    writer: impl Write,
    rows: &[FeatureVector],
    labels: Option<&[Label]>,
) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(writer);
    for (i, fv) in rows.iter().enumerate() {
        w.serialize(CsvRow {
            account: fv.account.clone(),
            total_comments: fv.total_comments,
            empty_comments: fv.empty_comments,
            pattern_count: fv.pattern_count,
            gini_patterns: fv.gini_patterns,
            label: labels.map(|l| l[i]),
        })?;
    }
    if rows.is_empty() {
        let mut header = vec!["account"];
        header.extend(FEATURE_SCHEMA);
        if labels.is_some() {
            header.push("label");
        }
        w.write_record(&header)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a feature CSV, checking that the feature columns follow
/// [`FEATURE_SCHEMA`]. Labels are returned when a `label` column exists.
pub fn read_features_csv(
    reader: impl Read,
) -> Result<Vec<(FeatureVector, Option<Label>)>, FeatureError> {
    let mut r = csv::Reader::from_reader(reader);
    let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let has_label = headers.last().is_some_and(|h| h == "label");
    let feature_cols = headers
        .get(1..headers.len() - usize::from(has_label))
        .unwrap_or(&[]);
    if headers.first().map(String::as_str) != Some("account")
        || !feature_cols.iter().map(String::as_str).eq(FEATURE_SCHEMA)
    {
        return Err(FeatureError::SchemaMismatch {
            found: headers,
            expected: FEATURE_SCHEMA.iter().map(|s| s.to_string()).collect(),
        });
    }
    let mut out = Vec::new();
    for (i, row) in r.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(|e| FeatureError::Row {
            row: i + 1,
            message: e.to_string(),
        })?;
        if row.empty_comments > row.total_comments || row.pattern_count > row.total_comments {
            return Err(FeatureError::Row {
                row: i + 1,
                message: "counts are inconsistent".into(),
            });
        }
        if has_label && row.label.is_none() {
            return Err(FeatureError::Row {
                row: i + 1,
                message: "missing label".into(),
            });
        }
        out.push((
            FeatureVector {
                account: row.account,
                total_comments: row.total_comments,
                empty_comments: row.empty_comments,
                pattern_count: row.pattern_count,
                gini_patterns: row.gini_patterns,
            },
            row.label,
        ));
    }
    Ok(out)
}

pub fn read_labeled_features(path: impl AsRef<Path>) -> Result<Vec<LabeledExample>, FeatureError> {
    read_features_csv(File::open(path)?)?
        .into_iter()
        .map(|(features, label)| {
            label
                .map(|label| LabeledExample { features, label })
                .ok_or(FeatureError::MissingLabels)
        })
        .collect()
}
