//! The three-step classification: comments in, features, one row per account.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use botgate_core::corpus::{group_comments, CorpusFilter, RawComment};
use botgate_core::features::{extract_features_batch, ExtractionParams};
use botgate_core::model::{load_model, ForestModel};
use botgate_core::patterns::ClusteringParams;
use botgate_core::textsim::DistanceOptions;

use crate::error::CliError;

/// Prediction shown for accounts below the minimum comment count.
pub const INSUFFICIENT: &str = "unknown (insufficient comments)";

/// Model trained on the bundled synthetic corpus; used when no model file is
/// given. It reflects synthetic data, not any real ground truth.
pub const REFERENCE_MODEL_JSON: &str = include_str!("../data/reference-model.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub account: String,
    pub total_comments: usize,
    pub empty_comments: Option<usize>,
    pub pattern_count: Option<usize>,
    #[serde(serialize_with = "four_decimals")]
    pub gini_patterns: Option<f64>,
    pub prediction: String,
    pub score: Option<f64>,
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn four_decimals<S: Serializer>(value: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_f64(round4(*v)),
        None => s.serialize_none(),
    }
}

pub fn reference_model() -> ForestModel {
    ForestModel::from_json(REFERENCE_MODEL_JSON).expect("bundled reference model is valid")
}

/// Loads `path`, or the reference model when `path` is `None`. Any failure
/// here is a model error, including a missing file.
pub fn resolve_model(path: Option<&Path>) -> Result<ForestModel, CliError> {
    let model = match path {
        None => reference_model(),
        Some(p) => load_model(p).map_err(|e| CliError::Model(format!("{}: {e}", p.display())))?,
    };
    model.check_schema().map_err(|e| CliError::Model(e.to_string()))?;
    Ok(model)
}

/// Extraction settings: explicit values win, then those recorded in the
/// model, then the defaults.
pub fn extraction_params(
    model: Option<&ForestModel>,
    eps: Option<f64>,
    min_samples: Option<usize>,
) -> Result<ExtractionParams, CliError> {
    let recorded = model.and_then(|m| m.extraction.clone());
    let defaults = ExtractionParams::default();
    let eps = eps.or(recorded.as_ref().map(|r| r.eps)).unwrap_or(defaults.clustering.eps());
    let min_samples = min_samples
        .or(recorded.as_ref().map(|r| r.min_samples))
        .unwrap_or(defaults.clustering.min_samples());
    let clustering = ClusteringParams::new(eps, min_samples).map_err(|e| CliError::Usage(e.to_string()))?;
    let distance = match recorded {
        Some(r) => DistanceOptions {
            max_levenshtein_chars: r.max_levenshtein_chars,
        },
        None => defaults.distance,
    };
    Ok(ExtractionParams { clustering, distance })
}

/// Groups, featurizes and classifies. Rows come out sorted by account.
pub fn classify(
    comments: &[RawComment],
    filter: &CorpusFilter,
    params: &ExtractionParams,
    model: &ForestModel,
) -> Result<Vec<PredictionRow>, CliError> {
    let grouped = group_comments(comments, filter);
    let features = extract_features_batch(&grouped.retained, params)?;
    let mut rows: Vec<PredictionRow> = features
        .into_iter()
        .map(|fv| {
            let p = model.predict_values(&fv.values());
            PredictionRow {
                account: fv.account,
                total_comments: fv.total_comments,
                empty_comments: Some(fv.empty_comments),
                pattern_count: Some(fv.pattern_count),
                gini_patterns: Some(fv.gini_patterns),
                prediction: p.label.to_string(),
                score: Some(p.score),
            }
        })
        .collect();
    rows.extend(grouped.insufficient.into_iter().map(|(account, n)| PredictionRow {
        account,
        total_comments: n,
        empty_comments: None,
        pattern_count: None,
        gini_patterns: None,
        prediction: INSUFFICIENT.to_string(),
        score: None,
    }));
    rows.sort_by(|a, b| a.account.cmp(&b.account));
    Ok(rows)
}

const COLUMNS: [&str; 7] = [
    "account",
    "total_comments",
    "empty_comments",
    "pattern_count",
    "gini_patterns",
    "prediction",
    "score",
];

fn cells(row: &PredictionRow) -> [String; 7] {
    let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
    [
        row.account.clone(),
        row.total_comments.to_string(),
        opt(row.empty_comments),
        opt(row.pattern_count),
        row.gini_patterns.map(|g| format!("{g:.4}")).unwrap_or_default(),
        row.prediction.clone(),
        row.score.map(|s| format!("{s:.4}")).unwrap_or_default(),
    ]
}

pub fn render(rows: &[PredictionRow], format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows)?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for r in rows {
                w.write_record(cells(r))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?)
                .map_err(|e| CliError::Io(e.to_string()))
        }
        OutputFormat::Table => {
            let headers = ["account", "comments", "empty", "patterns", "inequality", "prediction", "score"];
            let body: Vec<[String; 7]> = rows.iter().map(cells).collect();
            let mut widths = headers.map(str::len);
            for r in &body {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let mut out = String::new();
            let mut line = |cols: [&str; 7]| {
                let mut l = String::new();
                for (i, (c, w)) in cols.iter().zip(widths).enumerate() {
                    // text columns left-aligned, numbers right-aligned
                    if i == 0 || i == 5 {
                        let _ = write!(l, "{c:<w$}  ");
                    } else {
                        let _ = write!(l, "{c:>w$}  ");
                    }
                }
                out.push_str(l.trim_end());
                out.push('\n');
            };
            line(headers);
            for r in &body {
                line(r.each_ref().map(String::as_str));
            }
            Ok(out)
        }
    }
}
