//! Downloads issue comments, pull request conversation comments and pull
//! request descriptions of one repository through the GitHub GraphQL API.
//!
//! Requests go through a [`Transport`]; [`HttpTransport`] talks to GitHub and
//! [`ReplayTransport`] serves recorded exchanges. Rate limiting and transient
//! failures are retried according to a [`RetryPolicy`].

mod query;
pub mod retry;
pub mod transport;

use std::collections::HashSet;
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use thiserror::Error;

use botgate_core::corpus::{RawComment, RepositoryName, ThreadKind};

pub use retry::{Clock, RetryPolicy, SystemClock};
pub use transport::{
    Exchange, Fixture, GraphqlRequest, HttpResponse, HttpTransport, RecordedResponse, ReplayTransport, Transport,
    TransportFailure, DEFAULT_ENDPOINT,
};

use query::{CommentNode, CommentPage, GraphqlEnvelope, ThreadCommentsData, ThreadsData};

/// Login GitHub shows for comments whose author account was deleted.
pub const DELETED_AUTHOR: &str = "ghost";

/// The largest page the GraphQL API serves.
const MAX_PAGE: usize = 100;

#[derive(Debug, Error)]
pub enum GithubError {
    #[error("invalid repository name {0:?}, expected owner/name")]
    RepositorySyntax(String),
    #[error("no API token given")]
    MissingToken,
    #[error("invalid fetch limits: {0}")]
    InvalidLimits(String),
    #[error("GitHub rejected the credentials (HTTP {status})")]
    Credential { status: u16 },
    #[error("repository {0} not found")]
    NotFound(String),
    #[error("request failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("unexpected HTTP {status}: {body}")]
    UnexpectedStatus { status: u16, body: String },
    #[error("GraphQL error: {0}")]
    Graphql(String),
    #[error("malformed response: {0}")]
    Malformed(String),
}

/// Caps on how much history is downloaded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FetchLimits {
    /// Most recent issues fetched, and separately most recent pull requests.
    pub threads: usize,
    /// Most recent comments fetched per thread (descriptions excluded).
    pub comments_per_thread: usize,
    /// Threads requested per page, at most 100.
    pub page_size: usize,
}

impl Default for FetchLimits {
    fn default() -> Self {
        Self {
            threads: 100,
            comments_per_thread: 100,
            page_size: 50,
        }
    }
}

impl FetchLimits {
    fn validate(&self) -> Result<(), GithubError> {
        if self.page_size == 0 || self.page_size > MAX_PAGE {
            return Err(GithubError::InvalidLimits(format!(
                "page_size must be in 1..={MAX_PAGE}, got {}",
                self.page_size
            )));
        }
        if self.comments_per_thread == 0 {
            return Err(GithubError::InvalidLimits("comments_per_thread must be at least 1".into()));
        }
        Ok(())
    }
}

pub struct GithubClient<T, C = SystemClock> {
    transport: T,
    clock: C,
    retry: RetryPolicy,
}

impl GithubClient<HttpTransport> {
    /// Client for a live endpoint. An empty token is rejected up front.
    pub fn connect(endpoint: &str, token: &str) -> Result<Self, GithubError> {
        if token.trim().is_empty() {
            return Err(GithubError::MissingToken);
        }
        let transport = HttpTransport::new(endpoint, token.trim()).map_err(|e| GithubError::Transport {
            attempts: 0,
            message: e.0,
        })?;
        Ok(Self::new(transport))
    }
}

impl<T: Transport> GithubClient<T> {
    pub fn new(transport: T) -> Self {
        Self::with_clock(transport, SystemClock)
    }
}

impl<T: Transport, C: Clock> GithubClient<T, C> {
    pub fn with_clock(transport: T, clock: C) -> Self {
        Self {
            transport,
            clock,
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_retry_policy(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    /// Comments of the most recent issues and pull requests of `repository`,
    /// most recent first (ties by descending id).
    pub fn fetch_repository_comments(
        &self,
        repository: &str,
        limits: &FetchLimits,
    ) -> Result<Vec<RawComment>, GithubError> {
        let repo: RepositoryName = repository
            .parse()
            .map_err(|_| GithubError::RepositorySyntax(repository.to_string()))?;
        limits.validate()?;

        let mut out = Vec::new();
        for kind in [ThreadKind::Issue, ThreadKind::PullRequest] {
            self.fetch_threads(&repo, kind, limits, &mut out)?;
        }
        out.sort_by(RawComment::recency_order);
        Ok(out)
    }

    fn fetch_threads(
        &self,
        repo: &RepositoryName,
        kind: ThreadKind,
        limits: &FetchLimits,
        out: &mut Vec<RawComment>,
    ) -> Result<(), GithubError> {
        let repository = repo.to_string();
        let per_thread = limits.comments_per_thread.min(MAX_PAGE);
        let mut seen = HashSet::new();
        let mut after: Option<String> = None;
        while seen.len() < limits.threads {
            let first = (limits.threads - seen.len()).min(limits.page_size);
            let (operation, text) = match kind {
                ThreadKind::Issue => ("IssueThreads", query::ISSUE_THREADS),
                ThreadKind::PullRequest => ("PullRequestThreads", query::PULL_REQUEST_THREADS),
            };
            let data: ThreadsData = self.execute(
                operation,
                text,
                json!({
                    "owner": repo.owner(),
                    "name": repo.name(),
                    "first": first,
                    "after": after,
                    "comments": per_thread,
                }),
                &repository,
            )?;
            let connection = data
                .repository
                .ok_or_else(|| GithubError::NotFound(repository.clone()))?
                .threads;

            for thread in connection.nodes.into_iter().flatten() {
                if seen.len() >= limits.threads {
                    break;
                }
                if !seen.insert(thread.id.clone()) {
                    continue;
                }
                if kind == ThreadKind::PullRequest {
                    out.push(RawComment {
                        id: thread.id.clone(),
                        repository: repository.clone(),
                        thread_kind: kind,
                        is_description: true,
                        author: author_login(thread.author.as_ref()),
                        created_at: thread
                            .created_at
                            .ok_or_else(|| GithubError::Malformed(format!("{} lacks createdAt", thread.id)))?,
                        body: thread.body.clone().unwrap_or_default(),
                    });
                }
                let comments = self.thread_comments(&thread.id, thread.comments, limits.comments_per_thread, &repository)?;
                out.extend(comments.into_iter().map(|c| RawComment {
                    id: c.id,
                    repository: repository.clone(),
                    thread_kind: kind,
                    is_description: false,
                    author: author_login(c.author.as_ref()),
                    created_at: c.created_at,
                    body: c.body,
                }));
            }

            match (connection.page_info.has_next_page, connection.page_info.end_cursor) {
                (true, Some(cursor)) => after = Some(cursor),
                _ => break,
            }
        }
        Ok(())
    }

    /// Completes the comment list of one thread by paging backwards from
    /// the page embedded in the thread query.
    fn thread_comments(
        &self,
        thread_id: &str,
        first_page: CommentPage,
        cap: usize,
        repository: &str,
    ) -> Result<Vec<CommentNode>, GithubError> {
        let mut comments: Vec<CommentNode> = first_page.nodes.into_iter().flatten().collect();
        let mut page_info = first_page.page_info;
        while comments.len() < cap && page_info.has_previous_page {
            let Some(before) = page_info.start_cursor.take() else {
                break;
            };
            let count = (cap - comments.len()).min(MAX_PAGE);
            let data: ThreadCommentsData = self.execute(
                "ThreadComments",
                query::THREAD_COMMENTS,
                json!({ "id": thread_id, "count": count, "before": before }),
                repository,
            )?;
            let page = data
                .node
                .and_then(|n| n.comments)
                .ok_or_else(|| GithubError::Malformed(format!("thread {thread_id} vanished while paging")))?;
            comments.extend(page.nodes.into_iter().flatten());
            page_info = page.page_info;
        }
        // keep the most recent `cap`
        comments.sort_by(|a, b| b.created_at.cmp(&a.created_at).then_with(|| b.id.cmp(&a.id)));
        comments.truncate(cap);
        Ok(comments)
    }

    fn execute<D: DeserializeOwned>(
        &self,
        operation: &str,
        query: &str,
        variables: Value,
        repository: &str,
    ) -> Result<D, GithubError> {
        let request = GraphqlRequest {
            operation_name: operation.to_string(),
            query: query.to_string(),
            variables,
        };
        let mut retry = 0;
        loop {
            let attempt = retry + 1;
            let outcome = match self.transport.post(&request) {
                Ok(response) => classify(response, repository, self.clock.now()),
                Err(failure) => Outcome::Retry {
                    wait: None,
                    message: failure.0,
                },
            };
            match outcome {
                Outcome::Done(data) => {
                    return serde_json::from_value(data).map_err(|e| GithubError::Malformed(e.to_string()))
                }
                Outcome::Fail(e) => return Err(e),
                Outcome::Retry { wait, message } => {
                    if retry >= self.retry.max_retries {
                        return Err(GithubError::Transport {
                            attempts: attempt,
                            message,
                        });
                    }
                    self.clock.sleep(wait.unwrap_or_else(|| self.retry.backoff(retry)));
                    retry += 1;
                }
            }
        }
    }
}

/// Convenience wrapper: validates the repository name before anything else,
/// then fetches over HTTPS.
pub fn fetch_repository_comments(
    repository: &str,
    token: &str,
    endpoint: &str,
    limits: &FetchLimits,
) -> Result<Vec<RawComment>, GithubError> {
    repository
        .parse::<RepositoryName>()
        .map_err(|_| GithubError::RepositorySyntax(repository.to_string()))?;
    GithubClient::connect(endpoint, token)?.fetch_repository_comments(repository, limits)
}

fn author_login(author: Option<&query::Author>) -> String {
    author.map_or_else(|| DELETED_AUTHOR.to_string(), |a| a.login.clone())
}

enum Outcome {
    Done(Value),
    Retry { wait: Option<Duration>, message: String },
    Fail(GithubError),
}

/// Server-requested wait: `retry-after` seconds, or the time until
/// `x-ratelimit-reset` once the remaining budget is exhausted.
fn requested_wait(response: &HttpResponse, now: DateTime<Utc>) -> Option<Duration> {
    if let Some(secs) = response.header("retry-after").and_then(|v| v.trim().parse::<u64>().ok()) {
        return Some(Duration::from_secs(secs));
    }
    if response.header("x-ratelimit-remaining").map(str::trim) == Some("0") {
        let reset = response.header("x-ratelimit-reset")?.trim().parse::<i64>().ok()?;
        let wait = (reset - now.timestamp()).max(0);
        return Some(Duration::from_secs(wait as u64));
    }
    None
}

fn is_rate_limited(response: &HttpResponse) -> bool {
    response.status == 429
        || response.header("retry-after").is_some()
        || response.header("x-ratelimit-remaining").map(str::trim) == Some("0")
}

fn classify(response: HttpResponse, repository: &str, now: DateTime<Utc>) -> Outcome {
    let status = response.status;
    if matches!(status, 403 | 429) && is_rate_limited(&response) {
        return Outcome::Retry {
            wait: requested_wait(&response, now),
            message: format!("rate limited (HTTP {status})"),
        };
    }
    match status {
        200..=299 => {}
        401 | 403 => return Outcome::Fail(GithubError::Credential { status }),
        500..=599 => {
            return Outcome::Retry {
                wait: requested_wait(&response, now),
                message: format!("HTTP {status}"),
            }
        }
        _ => {
            return Outcome::Fail(GithubError::UnexpectedStatus {
                status,
                body: response.body.chars().take(200).collect(),
            })
        }
    }

    let envelope: GraphqlEnvelope = match serde_json::from_str(&response.body) {
        Ok(e) => e,
        Err(e) => return Outcome::Fail(GithubError::Malformed(e.to_string())),
    };
    if !envelope.errors.is_empty() {
        let kinds: Vec<&str> = envelope.errors.iter().filter_map(|e| e.kind.as_deref()).collect();
        if kinds.contains(&"NOT_FOUND") {
            return Outcome::Fail(GithubError::NotFound(repository.to_string()));
        }
        if kinds.contains(&"RATE_LIMITED") {
            return Outcome::Retry {
                wait: requested_wait(&response, now),
                message: "GraphQL rate limit exceeded".into(),
            };
        }
        let messages: Vec<&str> = envelope.errors.iter().map(|e| e.message.as_str()).collect();
        return Outcome::Fail(GithubError::Graphql(messages.join("; ")));
    }
    match envelope.data {
        Some(data) => Outcome::Done(data),
        None => Outcome::Fail(GithubError::Malformed("response has neither data nor errors".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles_and_caps() {
        let p = RetryPolicy::default();
        let secs: Vec<u64> = (0..8).map(|k| p.backoff(k).as_secs()).collect();
        assert_eq!(secs, [1, 2, 4, 8, 16, 32, 60, 60]);
        assert_eq!(p.backoff(200), Duration::from_secs(60));
    }

    #[test]
    fn limits_validation() {
        assert!(FetchLimits::default().validate().is_ok());
        let bad = FetchLimits {
            page_size: 101,
            ..FetchLimits::default()
        };
        assert!(matches!(bad.validate(), Err(GithubError::InvalidLimits(_))));
    }

    #[test]
    fn reset_header_gives_wait() {
        let now = DateTime::from_timestamp(1_000, 0).unwrap();
        let mut r = HttpResponse {
            status: 403,
            ..HttpResponse::default()
        };
        r.headers.insert("x-ratelimit-remaining".into(), "0".into());
        r.headers.insert("x-ratelimit-reset".into(), "1030".into());
        assert_eq!(requested_wait(&r, now), Some(Duration::from_secs(30)));
        r.headers.insert("retry-after".into(), "7".into());
        assert_eq!(requested_wait(&r, now), Some(Duration::from_secs(7)));
        assert!(is_rate_limited(&r));
    }

    #[test]
    fn deleted_author_is_ghost() {
        assert_eq!(author_login(None), DELETED_AUTHOR);
    }
}
