//! Training with grid-search cross-validation, and evaluation of a model on
//! labeled features.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use botgate_core::eval::{
    f1_by_comment_bins, fit_config, grid_search_cv, metrics_from_confusion, stratified_split_indices, BinRecord,
    BinReport, ClassifierConfig, ConfusionMatrix, GridSpec, MetricsReport,
};
use botgate_core::model::{zero_r, ExtractionMetadata, ForestModel, Label, LabeledExample};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub test_fraction: f64,
    /// Folds and seed for cross-validation; the seed also drives the split
    /// and the final fit.
    pub grid: GridSpec,
    pub bin_width: usize,
    /// Recorded in the model so that prediction extracts features the same way.
    pub extraction: ExtractionMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    GridSearch,
    Refit,
    TestEvaluation,
}

/// Which accounts each training phase was given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataAccess {
    pub phase: Phase,
    pub accounts: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub bots: usize,
    pub humans: usize,
}

impl ClassCounts {
    fn of(examples: &[&LabeledExample]) -> Self {
        let bots = examples.iter().filter(|e| e.label == Label::Bot).count();
        Self {
            bots,
            humans: examples.len() - bots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub config: String,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
    pub mean_bot_recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub examples: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport<f64>,
    pub bins: Vec<BinReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub seed: u64,
    pub test_fraction: f64,
    pub folds: usize,
    pub train: ClassCounts,
    pub test: ClassCounts,
    /// Best first.
    pub cross_validation: Vec<CvRow>,
    pub selected: ClassifierConfig,
    pub test_evaluation: EvaluationReport,
    pub zero_r_test_evaluation: EvaluationReport,
}

pub struct TrainOutcome {
    pub model: ForestModel,
    pub report: TrainReport,
    pub audit: Vec<DataAccess>,
}

fn accounts(examples: &[&LabeledExample]) -> Vec<String> {
    examples.iter().map(|e| e.features.account.clone()).collect()
}

/// Splits, cross-validates every grid configuration on the training part,
/// refits the best one on the whole training part and evaluates it once on
/// the held-out part.
pub fn train(examples: &[LabeledExample], options: &TrainOptions) -> Result<TrainOutcome, CliError> {
    let labels: Vec<Label> = examples.iter().map(|e| e.label).collect();
    let (train_idx, test_idx) = stratified_split_indices(&labels, options.test_fraction, options.grid.seed)?;
    let train_set: Vec<&LabeledExample> = train_idx.iter().map(|&i| &examples[i]).collect();
    let test_set: Vec<&LabeledExample> = test_idx.iter().map(|&i| &examples[i]).collect();
    let owned_train: Vec<LabeledExample> = train_set.iter().map(|e| (*e).clone()).collect();
    let mut audit = Vec::new();

    audit.push(DataAccess {
        phase: Phase::GridSearch,
        accounts: accounts(&train_set),
    });
    let search = grid_search_cv(&owned_train, &options.grid)?;
    let selected = search.best().config.clone();

    audit.push(DataAccess {
        phase: Phase::Refit,
        accounts: accounts(&train_set),
    });
    let mut model = fit_config(&selected, &owned_train, options.grid.seed)?;
    model.extraction = Some(options.extraction.clone());

    audit.push(DataAccess {
        phase: Phase::TestEvaluation,
        accounts: accounts(&test_set),
    });
    let test_evaluation = evaluate(&model, &test_set, options.bin_width)?;
    let baseline = zero_r(&labels_of(&train_set))?.to_model();
    let zero_r_test_evaluation = evaluate(&baseline, &test_set, options.bin_width)?;

    let report = TrainReport {
        seed: options.grid.seed,
        test_fraction: options.test_fraction,
        folds: options.grid.k,
        train: ClassCounts::of(&train_set),
        test: ClassCounts::of(&test_set),
        cross_validation: search
            .ranked
            .iter()
            .map(|s| CvRow {
                config: s.config.to_string(),
                mean_precision: s.mean_precision,
                mean_recall: s.mean_recall,
                mean_f1: s.mean_f1,
                mean_bot_recall: s.mean_bot_recall,
            })
            .collect(),
        selected,
        test_evaluation,
        zero_r_test_evaluation,
    };
    Ok(TrainOutcome { model, report, audit })
}

fn labels_of(examples: &[&LabeledExample]) -> Vec<Label> {
    examples.iter().map(|e| e.label).collect()
}

/// Applies `model` to labeled examples.
pub fn evaluate(model: &ForestModel, examples: &[&LabeledExample], bin_width: usize) -> Result<EvaluationReport, CliError> {
    model.check_schema().map_err(|e| CliError::Model(e.to_string()))?;
    let records: Vec<BinRecord> = examples
        .iter()
        .map(|e| BinRecord {
            truth: e.label,
            predicted: model.predict_values(&e.features.values()).label,
            non_empty_comments: e.features.non_empty_comments(),
        })
        .collect();
    let confusion = ConfusionMatrix::from_pairs(records.iter().map(|r| (r.truth, r.predicted)));
    Ok(EvaluationReport {
        examples: examples.len(),
        metrics: metrics_from_confusion(&confusion, confusion.bots(), confusion.humans())?,
        confusion,
        bins: f1_by_comment_bins(&records, bin_width)?,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?).map_err(|e| CliError::Io(e.to_string()))
}

pub fn confusion_csv(cm: &ConfusionMatrix) -> Result<String, CliError> {
    csv_string(
        &["truth", "predicted_bot", "predicted_human"],
        [
            vec!["bot".into(), cm.tp.to_string(), cm.fn_.to_string()],
            vec!["human".into(), cm.fp.to_string(), cm.tn.to_string()],
        ],
    )
}

pub fn metrics_csv(m: &MetricsReport<f64>) -> Result<String, CliError> {
    let rows = [
        ("bot", m.bot.precision, m.bot.recall, m.bot.f1),
        ("human", m.human.precision, m.human.recall, m.human.f1),
        ("weighted", m.precision, m.recall, m.f1),
    ];
    csv_string(
        &["class", "precision", "recall", "f1"],
        rows.iter().map(|(c, p, r, f)| vec![c.to_string(), p.to_string(), r.to_string(), f.to_string()]),
    )
}

pub fn bins_csv(bins: &[BinReport]) -> Result<String, CliError> {
    csv_string(
        &["lower", "upper", "population", "bots", "humans", "f1", "bot_f1", "human_f1"],
        bins.iter().map(|b| {
            vec![
                b.lower.to_string(),
                b.upper.to_string(),
                b.population.to_string(),
                b.confusion.bots().to_string(),
                b.confusion.humans().to_string(),
                b.metrics.f1.to_string(),
                b.metrics.bot.f1.to_string(),
                b.metrics.human.f1.to_string(),
            ]
        }),
    )
}

pub fn cv_csv(rows: &[CvRow]) -> Result<String, CliError> {
    csv_string(
        &["config", "mean_precision", "mean_recall", "mean_f1", "mean_bot_recall"],
        rows.iter().map(|r| {
            vec![
                r.config.clone(),
                r.mean_precision.to_string(),
                r.mean_recall.to_string(),
                r.mean_f1.to_string(),
                r.mean_bot_recall.to_string(),
            ]
        }),
    )
}

/// Writes `cross_validation.csv`, `confusion.csv`, `metrics.csv` and
/// `bins.csv` into `dir`.
pub fn write_tables(dir: &Path, report: &TrainReport) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("cross_validation.csv"), cv_csv(&report.cross_validation)?)?;
    fs::write(dir.join("confusion.csv"), confusion_csv(&report.test_evaluation.confusion)?)?;
    fs::write(dir.join("metrics.csv"), metrics_csv(&report.test_evaluation.metrics)?)?;
    fs::write(dir.join("bins.csv"), bins_csv(&report.test_evaluation.bins)?)?;
    Ok(())
}

/// Plain-text summary of an evaluation.
pub fn render_evaluation(r: &EvaluationReport) -> String {
    let m = &r.metrics;
    let cm = &r.confusion;
    let mut out = format!("examples: {}\n\n", r.examples);
    out.push_str("class      precision  recall  f1\n");
    for (name, c) in [("bot", &m.bot), ("human", &m.human)] {
        out.push_str(&format!("{name:<9}  {:>9.4}  {:>6.4}  {:.4}\n", c.precision, c.recall, c.f1));
    }
    out.push_str(&format!("{:<9}  {:>9.4}  {:>6.4}  {:.4}\n\n", "weighted", m.precision, m.recall, m.f1));
    out.push_str("confusion  predicted bot  predicted human\n");
    out.push_str(&format!("bot        {:>13}  {:>15}\n", cm.tp, cm.fn_));
    out.push_str(&format!("human      {:>13}  {:>15}\n\n", cm.fp, cm.tn));
    out.push_str("non-empty comments  accounts  f1\n");
    for b in &r.bins {
        out.push_str(&format!("{:>8}-{:<9}  {:>8}  {:.4}\n", b.lower, b.upper, b.population, b.metrics.f1));
    }
    out
}
