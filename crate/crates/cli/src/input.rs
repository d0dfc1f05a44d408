//! Where comments come from, and the labels that go with features.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use botgate_core::corpus::{load_corpus, RawComment};
use botgate_core::model::Label;
use botgate_github::FetchLimits;

use crate::error::CliError;

pub const TOKEN_ENV: &str = "BOTGATE_GITHUB_TOKEN";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommentSource {
    Repository {
        name: String,
        token: Option<String>,
        endpoint: String,
        limits: FetchLimits,
    },
    Corpus(PathBuf),
}

impl CommentSource {
    /// Downloads or reads every comment of the source.
    pub fn load(&self) -> Result<Vec<RawComment>, CliError> {
        match self {
            CommentSource::Repository {
                name,
                token,
                endpoint,
                limits,
            } => {
                let token = token.as_deref().unwrap_or_default();
                Ok(botgate_github::fetch_repository_comments(name, token, endpoint, limits)?)
            }
            CommentSource::Corpus(path) => Ok(load_corpus(path)?),
        }
    }
}

/// Reads account labels from a CSV with `account` and `label` columns (any
/// other columns, such as `repository`, are ignored). Rows whose label is
/// neither `bot` nor `human` are skipped; conflicting labels for one
/// account are an error.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, Label>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("{}: no {name} column", path.display())))
    };
    let (account_col, label_col) = (column("account")?, column("label")?);
    let mut labels = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let (Some(account), Some(label)) = (record.get(account_col), record.get(label_col)) else {
            continue;
        };
        let Ok(label) = label.parse::<Label>() else {
            continue;
        };
        if let Some(previous) = labels.insert(account.to_string(), label) {
            if previous != label {
                return Err(CliError::Data(format!("{}: account {account} has both labels", path.display())));
            }
        }
    }
    Ok(labels)
}

/// Writes `account,label` rows in account order.
pub fn write_labels(path: &Path, labels: &BTreeMap<String, Label>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["account", "label"])?;
    for (account, label) in labels {
        w.write_record([account.as_str(), label.as_str()])?;
    }
    w.flush()?;
    Ok(())
}
