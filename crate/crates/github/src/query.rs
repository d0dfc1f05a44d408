//! GraphQL documents and the response shapes they produce.

use chrono::{DateTime, Utc};
use serde::Deserialize;
use serde_json::Value;

pub const ISSUE_THREADS: &str = r#"
query IssueThreads($owner: String!, $name: String!, $first: Int!, $after: String, $comments: Int!) {
  repository(owner: $owner, name: $name) {
    threads: issues(first: $first, after: $after, orderBy: {field: CREATED_AT, direction: DESC}) {
      pageInfo { hasNextPage endCursor }
      nodes {
        id
        comments(last: $comments) {
          pageInfo { hasPreviousPage startCursor }
          nodes { id author { login } createdAt body }
        }
      }
    }
  }
}
"#;

pub const PULL_REQUEST_THREADS: &str = r#"
query PullRequestThreads($owner: String!, $name: String!, $first: Int!, $after: String, $comments: Int!) {
  repository(owner: $owner, name: $name) {
    threads: pullRequests(first: $first, after: $after, orderBy: {field: CREATED_AT, direction: DESC}) {
      pageInfo { hasNextPage endCursor }
      nodes {
        id
        author { login }
        createdAt
        body
        comments(last: $comments) {
          pageInfo { hasPreviousPage startCursor }
          nodes { id author { login } createdAt body }
        }
      }
    }
  }
}
"#;

pub const THREAD_COMMENTS: &str = r#"
query ThreadComments($id: ID!, $count: Int!, $before: String) {
  node(id: $id) {
    ... on Issue {
      comments(last: $count, before: $before) {
        pageInfo { hasPreviousPage startCursor }
        nodes { id author { login } createdAt body }
      }
    }
    ... on PullRequest {
      comments(last: $count, before: $before) {
        pageInfo { hasPreviousPage startCursor }
        nodes { id author { login } createdAt body }
      }
    }
  }
}
"#;

#[derive(Debug, Deserialize)]
pub struct GraphqlEnvelope {
    pub data: Option<Value>,
    #[serde(default)]
    pub errors: Vec<GraphqlError>,
}

#[derive(Debug, Deserialize)]
pub struct GraphqlError {
    #[serde(rename = "type")]
    pub kind: Option<String>,
    #[serde(default)]
    pub message: String,
}

#[derive(Debug, Deserialize)]
pub struct ThreadsData {
    pub repository: Option<Repository>,
}

#[derive(Debug, Deserialize)]
pub struct Repository {
    pub threads: ThreadConnection,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ThreadConnection {
    pub page_info: ForwardPageInfo,
    #[serde(default)]
    pub nodes: Vec<Option<Thread>>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ForwardPageInfo {
    pub has_next_page: bool,
    pub end_cursor: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Thread {
    pub id: String,
    #[serde(default)]
    pub author: Option<Author>,
    #[serde(default)]
    pub created_at: Option<DateTime<Utc>>,
    /// Only requested for pull requests; GitHub returns null or "" when the
    /// description was left empty.
    #[serde(default)]
    pub body: Option<String>,
    pub comments: CommentPage,
}

#[derive(Debug, Deserialize)]
pub struct Author {
    pub login: String,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CommentPage {
    pub page_info: BackwardPageInfo,
    #[serde(default)]
    pub nodes: Vec<Option<CommentNode>>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BackwardPageInfo {
    pub has_previous_page: bool,
    pub start_cursor: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CommentNode {
    pub id: String,
    pub author: Option<Author>,
    pub created_at: DateTime<Utc>,
    #[serde(default, deserialize_with = "null_as_empty")]
    pub body: String,
}

#[derive(Debug, Deserialize)]
pub struct ThreadCommentsData {
    pub node: Option<ThreadNode>,
}

#[derive(Debug, Deserialize)]
pub struct ThreadNode {
    pub comments: Option<CommentPage>,
}

fn null_as_empty<'de, D: serde::Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    Ok(Option::<String>::deserialize(d)?.unwrap_or_default())
}
