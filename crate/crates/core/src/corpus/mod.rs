//! Comment corpus: the per-comment record, JSON Lines persistence, and the
//! grouping/filtering rules that turn a flat comment list into per-account
//! activity.

pub mod synthetic;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot open corpus {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: invalid record: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: duplicate comment id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("invalid repository name {0:?}, expected owner/name")]
    RepositorySyntax(String),
    #[error("invalid corpus filter: {0}")]
    Filter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThreadKind {
    Issue,
    PullRequest,
}

/// One issue/PR comment, or the description body of a pull request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawComment {
    pub id: String,
    pub repository: String,
    pub thread_kind: ThreadKind,
    pub is_description: bool,
    pub author: String,
    pub created_at: DateTime<Utc>,
    pub body: String,
}

impl RawComment {
    /// Most recent first, ties broken by descending id.
    pub fn recency_order(a: &RawComment, b: &RawComment) -> std::cmp::Ordering {
        b.created_at
            .cmp(&a.created_at)
            .then_with(|| b.id.cmp(&a.id))
    }
}

/// A validated `owner/name` repository identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepositoryName {
    owner: String,
    name: String,
}

impl RepositoryName {
    pub fn owner(&self) -> &str {
        &self.owner
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl FromStr for RepositoryName {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let valid_part = |p: &str| {
            !p.is_empty()
                && p
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        };
        match s.split_once('/') {
            Some((owner, name)) if valid_part(owner) && valid_part(name) => Ok(Self {
                owner: owner.to_string(),
                name: name.to_string(),
            }),
            _ => Err(CorpusError::RepositorySyntax(s.to_string())),
        }
    }
}

impl fmt::Display for RepositoryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.owner, self.name)
    }
}

/// All retained comments of one account, most recent first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccountActivity {
    account: String,
    comments: Vec<RawComment>,
    repositories: BTreeSet<String>,
}

impl AccountActivity {
    /// Builds an activity record, sorting comments most recent first.
    ///
    /// Comments authored by anyone other than `account` are rejected.
    pub fn new(account: impl Into<String>, mut comments: Vec<RawComment>) -> Result<Self, CorpusError> {
        let account = account.into();
        if let Some(c) = comments.iter().find(|c| c.author != account) {
            return Err(CorpusError::Filter(format!(
                "comment {} is authored by {} not {}",
                c.id, c.author, account
            )));
        }
        comments.sort_by(RawComment::recency_order);
        let repositories = comments.iter().map(|c| c.repository.clone()).collect();
        Ok(Self {
            account,
            comments,
            repositories,
        })
    }

    pub fn account(&self) -> &str {
        &self.account
    }

    pub fn comments(&self) -> &[RawComment] {
        &self.comments
    }

    pub fn repositories(&self) -> &BTreeSet<String> {
        &self.repositories
    }

    pub fn bodies(&self) -> impl Iterator<Item = &str> {
        self.comments.iter().map(|c| c.body.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFilter {
    min_comments: usize,
    max_comments: usize,
    pub start_date: Option<DateTime<Utc>>,
    pub accounts: Option<BTreeSet<String>>,
}

impl Default for CorpusFilter {
    fn default() -> Self {
        Self {
            min_comments: 10,
            max_comments: 100,
            start_date: None,
            accounts: None,
        }
    }
}

impl CorpusFilter {
    pub fn new(min_comments: usize, max_comments: usize) -> Result<Self, CorpusError> {
        if min_comments == 0 {
            return Err(CorpusError::Filter("min_comments must be at least 1".into()));
        }
        if min_comments > max_comments {
            return Err(CorpusError::Filter(format!(
                "min_comments ({min_comments}) exceeds max_comments ({max_comments})"
            )));
        }
        Ok(Self {
            min_comments,
            max_comments,
            ..Self::default()
        })
    }

    pub fn with_start_date(mut self, start: DateTime<Utc>) -> Self {
        self.start_date = Some(start);
        self
    }

    pub fn with_accounts<I, S>(mut self, accounts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.accounts = Some(accounts.into_iter().map(Into::into).collect());
        self
    }

    pub fn min_comments(&self) -> usize {
        self.min_comments
    }

    pub fn max_comments(&self) -> usize {
        self.max_comments
    }
}

/// Result of grouping: retained accounts plus the ones dropped for having too
/// few comments (name and retained count), both sorted by account name.
#[derive(Debug, Clone, Default)]
pub struct GroupedCorpus {
    pub retained: Vec<AccountActivity>,
    pub insufficient: Vec<(String, usize)>,
}

/// Groups comments by author and applies `filter`.
///
/// Order of rules: start date, then the most-recent cap, then the minimum
/// count, with the allow-list applied up front. Empty comments count.
pub fn group_comments(comments: &[RawComment], filter: &CorpusFilter) -> GroupedCorpus {
    let mut by_author: BTreeMap<&str, Vec<&RawComment>> = BTreeMap::new();
    for c in comments {
        if let Some(allow) = &filter.accounts {
            if !allow.contains(&c.author) {
                continue;
            }
        }
        if let Some(start) = filter.start_date {
            if c.created_at < start {
                continue;
            }
        }
        by_author.entry(c.author.as_str()).or_default().push(c);
    }

    let mut grouped = GroupedCorpus::default();
    for (author, mut list) in by_author {
        list.sort_by(|a, b| RawComment::recency_order(a, b));
        list.truncate(filter.max_comments);
        if list.len() < filter.min_comments {
            grouped.insufficient.push((author.to_string(), list.len()));
            continue;
        }
        let owned = list.into_iter().cloned().collect();
        grouped
            .retained
            .push(AccountActivity::new(author, owned).expect("grouped by author"));
    }
    grouped
}

pub fn group_and_filter(comments: &[RawComment], filter: &CorpusFilter) -> Vec<AccountActivity> {
    group_comments(comments, filter).retained
}

/// True iff the body is empty after trimming Unicode whitespace.
pub fn is_empty_comment(body: &str) -> bool {
    body.trim().is_empty()
}

/// Reads a JSON Lines corpus. Blank lines are skipped.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<RawComment>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Open {
        path: path.display().to_string(),
        source,
    })?;
    read_corpus(BufReader::new(file))
}

pub fn read_corpus(reader: impl BufRead) -> Result<Vec<RawComment>, CorpusError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let comment: RawComment = serde_json::from_str(&line).map_err(|e| CorpusError::Schema {
            line: line_no,
            message: e.to_string(),
        })?;
        if comment.repository.parse::<RepositoryName>().is_err() {
            return Err(CorpusError::Schema {
                line: line_no,
                message: format!(
                    "record {:?}: repository {:?} is not owner/name",
                    comment.id, comment.repository
                ),
            });
        }
        if !seen.insert(comment.id.clone()) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                id: comment.id,
            });
        }
        out.push(comment);
    }
    Ok(out)
}

pub fn write_corpus(path: impl AsRef<Path>, comments: &[RawComment]) -> Result<(), CorpusError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_corpus_to(&mut w, comments)?;
    w.flush()?;
    Ok(())
}

pub fn write_corpus_to(mut w: impl Write, comments: &[RawComment]) -> Result<(), CorpusError> {
    for c in comments {
        serde_json::to_writer(&mut w, c).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
