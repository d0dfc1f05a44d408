//! `botgate`: classify the commenters of a repository as bots or humans.
//!
//! The binary is a thin shell over this library. Every subcommand maps to a
//! function here, and every failure to a [`CliError`] with a fixed exit
//! code.

pub mod dataset;
pub mod error;
pub mod input;
pub mod predict;
pub mod rating;
pub mod train;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use chrono::{DateTime, NaiveDate, Utc};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use botgate_core::corpus::synthetic::{generate, SyntheticConfig};
use botgate_core::corpus::{write_corpus, CorpusFilter};
use botgate_core::eval::{DecisionTreeGrid, GridSpec, RandomForestGrid};
use botgate_core::features::read_labeled_features;
use botgate_core::model::save_model;
use botgate_github::{FetchLimits, DEFAULT_ENDPOINT};

pub use error::CliError;
use input::{read_labels, write_labels, CommentSource, TOKEN_ENV};
use predict::OutputFormat;

#[derive(Debug, Parser)]
#[command(name = "botgate", version, about = "Tell bots from humans by the comments they leave on GitHub")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every commenter of a repository or corpus file.
    Predict(PredictArgs),
    /// Write the per-account feature CSV, optionally with labels.
    ExportFeatures(ExportFeaturesArgs),
    /// Grid-search, fit and test a model on a labeled feature CSV.
    Train(TrainArgs),
    /// Score a saved model on a labeled feature CSV.
    Evaluate(EvaluateArgs),
    /// Run the HTTP backend for manual rating.
    ServeRating(ServeRatingArgs),
    /// Write the ground-truth CSV and its sidecar from a ratings log.
    ExportGroundTruth(GroundTruthArgs),
    /// Write the synthetic corpus and its labels.
    SynthCorpus(SynthArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Repository to download, as owner/name.
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    pub repo: Option<String>,
    /// JSON Lines corpus file instead of a download.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// GitHub API token.
    #[arg(long = "key", short = 'k', env = TOKEN_ENV, hide_env_values = true)]
    pub key: Option<String>,
    /// GraphQL endpoint.
    #[arg(long, default_value = DEFAULT_ENDPOINT)]
    pub api_url: String,
}

impl SourceArgs {
    pub fn source(&self) -> CommentSource {
        match (&self.repo, &self.corpus) {
            (Some(name), _) => CommentSource::Repository {
                name: name.clone(),
                token: self.key.clone(),
                endpoint: self.api_url.clone(),
                limits: FetchLimits::default(),
            },
            (None, Some(path)) => CommentSource::Corpus(path.clone()),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

fn parse_start_date(s: &str) -> Result<DateTime<Utc>, String> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.with_timezone(&Utc));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc())
        .map_err(|_| format!("{s:?} is neither YYYY-MM-DD nor an RFC 3339 timestamp"))
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Accounts with fewer comments are reported as unknown.
    #[arg(long, default_value_t = 10)]
    pub min_comments: usize,
    /// Only the most recent comments of each account are used.
    #[arg(long, default_value_t = 100)]
    pub max_comments: usize,
    /// Ignore comments created before this date.
    #[arg(long, value_parser = parse_start_date)]
    pub start_date: Option<DateTime<Utc>>,
    /// Restrict to these accounts (repeatable or comma-separated).
    #[arg(long = "accounts", value_delimiter = ',')]
    pub accounts: Vec<String>,
}

impl FilterArgs {
    pub fn filter(&self) -> Result<CorpusFilter, CliError> {
        let mut f = CorpusFilter::new(self.min_comments, self.max_comments)?;
        if let Some(start) = self.start_date {
            f = f.with_start_date(start);
        }
        if !self.accounts.is_empty() {
            f = f.with_accounts(self.accounts.iter().cloned());
        }
        Ok(f)
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Largest distance at which two comments share a pattern.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Neighbours (self included) a comment needs to seed a pattern.
    #[arg(long)]
    pub min_samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    /// Model file; the bundled reference model by default.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub output_format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ExportFeaturesArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    /// CSV with account and label columns; unlabeled accounts are dropped.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Destination; standard output by default.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled feature CSV.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub model_out: PathBuf,
    /// JSON training report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Directory for the CSV tables of the report.
    #[arg(long)]
    pub tables: Option<PathBuf>,
    /// JSON record of which accounts each training phase used.
    #[arg(long)]
    pub audit: Option<PathBuf>,
    /// JSON grid with optional random_forest, decision_tree and zero_r keys.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, default_value_t = 0.4)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = dataset::REFERENCE_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub bin_width: usize,
    #[command(flatten)]
    pub cluster: ClusterArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Labeled feature CSV.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub output_format: OutputFormat,
    #[arg(long, default_value_t = 5)]
    pub bin_width: usize,
}

#[derive(Debug, Args)]
pub struct RatingArgs {
    /// JSON file with the salt and the rater roster.
    #[arg(long)]
    pub config: PathBuf,
    /// Corpus whose accounts are rated.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Append-only ratings log.
    #[arg(long)]
    pub log: PathBuf,
    #[command(flatten)]
    pub filter: FilterArgs,
}

#[derive(Debug, Args)]
pub struct ServeRatingArgs {
    #[command(flatten)]
    pub rating: RatingArgs,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Static files of the rating frontend.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroundTruthArgs {
    #[command(flatten)]
    pub rating: RatingArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Mixed and unresolved accounts; `<out>.excluded.csv` by default.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Corpus destination (JSON Lines).
    #[arg(long)]
    pub out: PathBuf,
    /// `account,label` destination.
    #[arg(long)]
    pub labels_out: PathBuf,
    #[arg(long, default_value_t = 400)]
    pub accounts: usize,
    #[arg(long, default_value_t = 0.1)]
    pub bot_fraction: f64,
    #[arg(long, default_value_t = dataset::REFERENCE_SEED)]
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    #[serde(default)]
    random_forest: Option<RandomForestGrid>,
    #[serde(default)]
    decision_tree: Option<DecisionTreeGrid>,
    #[serde(default)]
    zero_r: bool,
}

fn write_or_print(path: Option<&PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Runs one command, writing its primary output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Predict(a) => {
            let filter = a.filter.filter()?;
            let model = predict::resolve_model(a.model.as_deref())?;
            let params = predict::extraction_params(Some(&model), a.cluster.eps, a.cluster.min_samples)?;
            let comments = a.source.source().load()?;
            let rows = predict::classify(&comments, &filter, &params, &model)?;
            out.write_all(predict::render(&rows, a.output_format)?.as_bytes())?;
        }
        Command::ExportFeatures(a) => {
            let filter = a.filter.filter()?;
            let params = predict::extraction_params(None, a.cluster.eps, a.cluster.min_samples)?;
            let labels = a.labels.as_deref().map(read_labels).transpose()?;
            let comments = a.source.source().load()?;
            let features = dataset::features_of(&comments, &filter, &params)?;
            let text = match labels {
                Some(labels) => {
                    let (labeled, unlabeled) = dataset::attach_labels(features, &labels);
                    if !unlabeled.is_empty() {
                        eprintln!("botgate: {} account(s) without a label were left out", unlabeled.len());
                    }
                    dataset::labeled_csv(&labeled)?
                }
                None => {
                    let mut buf = Vec::new();
                    botgate_core::features::write_features_csv(&mut buf, &features, None)?;
                    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))?
                }
            };
            write_or_print(a.output.as_ref(), &text, out)?;
        }
        Command::Train(a) => {
            let examples = read_labeled_features(&a.features)?;
            let mut options = dataset::default_train_options();
            options.test_fraction = a.test_fraction;
            options.bin_width = a.bin_width;
            options.extraction = predict::extraction_params(None, a.cluster.eps, a.cluster.min_samples)?.metadata();
            options.grid = match &a.grid {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    let g: GridFile =
                        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    GridSpec {
                        random_forest: g.random_forest,
                        decision_tree: g.decision_tree,
                        zero_r: g.zero_r,
                        k: a.folds,
                        seed: a.seed,
                    }
                }
                None => GridSpec {
                    k: a.folds,
                    seed: a.seed,
                    ..GridSpec::default()
                },
            };
            let outcome = train::train(&examples, &options)?;
            save_model(&outcome.model, &a.model_out).map_err(|e| CliError::Io(format!("{}: {e}", a.model_out.display())))?;
            if let Some(p) = &a.report {
                write_or_print(Some(p), &train::to_json(&outcome.report)?, out)?;
            }
            if let Some(dir) = &a.tables {
                train::write_tables(dir, &outcome.report)?;
            }
            if let Some(p) = &a.audit {
                write_or_print(Some(p), &train::to_json(&outcome.audit)?, out)?;
            }
            let r = &outcome.report;
            writeln!(out, "selected {}", r.selected)?;
            writeln!(
                out,
                "train {} bots / {} humans, test {} bots / {} humans",
                r.train.bots, r.train.humans, r.test.bots, r.test.humans
            )?;
            out.write_all(train::render_evaluation(&r.test_evaluation).as_bytes())?;
        }
        Command::Evaluate(a) => {
            let model = predict::resolve_model(a.model.as_deref())?;
            let examples = read_labeled_features(&a.features)?;
            let refs: Vec<_> = examples.iter().collect();
            let report = train::evaluate(&model, &refs, a.bin_width)?;
            let text = match a.output_format {
                OutputFormat::Json => train::to_json(&report)?,
                OutputFormat::Csv => train::metrics_csv(&report.metrics)?,
                OutputFormat::Table => train::render_evaluation(&report),
            };
            out.write_all(text.as_bytes())?;
        }
        Command::ServeRating(a) => {
            let setup = rating_setup(&a.rating)?;
            rating::serve_rating(&setup, &a.bind, a.port, a.ui_dir, out)?;
        }
        Command::ExportGroundTruth(a) => {
            let store = rating_setup(&a.rating)?.open()?;
            let export = store.service().export();
            let sidecar = a.sidecar.unwrap_or_else(|| rating::default_sidecar(&a.out));
            rating::write_export(&export, &a.out, &sidecar)?;
            writeln!(
                out,
                "{} row(s) written to {}, {} excluded account(s) to {}",
                export.rows.len(),
                a.out.display(),
                export.excluded.len(),
                sidecar.display()
            )?;
        }
        Command::SynthCorpus(a) => {
            if !(0.0..=1.0).contains(&a.bot_fraction) {
                return Err(CliError::Usage(format!("bot fraction {} outside [0, 1]", a.bot_fraction)));
            }
            let corpus = generate(&SyntheticConfig {
                accounts: a.accounts,
                bot_fraction: a.bot_fraction,
                seed: a.seed,
                ..SyntheticConfig::default()
            });
            write_corpus(&a.out, &corpus.comments)?;
            write_labels(&a.labels_out, &corpus.labels)?;
            writeln!(out, "{} comments from {} accounts", corpus.comments.len(), corpus.labels.len())?;
        }
    }
    Ok(())
}

fn rating_setup(a: &RatingArgs) -> Result<rating::RatingSetup, CliError> {
    Ok(rating::RatingSetup {
        config: a.config.clone(),
        corpus: a.corpus.clone(),
        log: a.log.clone(),
        filter: a.filter.filter()?,
    })
}
