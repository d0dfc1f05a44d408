//! A simulated repository answering the three queries with cursor-based
//! paging, checked against a direct computation of what the caps allow.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, TimeZone, Utc};
use proptest::prelude::*;
use serde_json::{json, Value};

use botgate_core::corpus::ThreadKind;
use botgate_github::{FetchLimits, GithubClient, GraphqlRequest, HttpResponse, Transport, TransportFailure};

#[derive(Debug, Clone)]
struct SimThread {
    id: String,
    /// Comment timestamps as minute offsets, oldest first.
    comments: Vec<i64>,
}

#[derive(Debug, Clone)]
struct SimRepo {
    issues: Vec<SimThread>,
    pulls: Vec<SimThread>,
}

fn ts(minutes: i64) -> String {
    (Utc.with_ymd_and_hms(2022, 1, 1, 0, 0, 0).unwrap() + Duration::minutes(minutes)).to_rfc3339()
}

fn comment_json(thread: &str, idx: usize, minute: i64) -> Value {
    json!({"id": format!("{thread}-c{idx:03}"), "author": {"login": format!("user{}", idx % 4)}, "createdAt": ts(minute), "body": format!("comment {idx}")})
}

/// `last: count, before: cursor` over a thread's comment list; cursors are indices.
fn comment_page(t: &SimThread, count: usize, before: Option<usize>) -> Value {
    let end = before.unwrap_or(t.comments.len());
    let start = end.saturating_sub(count);
    let nodes: Vec<Value> = (start..end).map(|i| comment_json(&t.id, i, t.comments[i])).collect();
    json!({"pageInfo": {"hasPreviousPage": start > 0, "startCursor": start.to_string()}, "nodes": nodes})
}

impl Transport for SimRepo {
    fn post(&self, request: &GraphqlRequest) -> Result<HttpResponse, TransportFailure> {
        let v = &request.variables;
        let data = match request.operation_name.as_str() {
            op @ ("IssueThreads" | "PullRequestThreads") => {
                let threads = if op == "IssueThreads" { &self.issues } else { &self.pulls };
                let first = v["first"].as_u64().unwrap() as usize;
                let after = v["after"].as_str().map_or(0, |c| c.parse::<usize>().unwrap());
                let count = v["comments"].as_u64().unwrap() as usize;
                let end = (after + first).min(threads.len());
                let nodes: Vec<Value> = threads[after..end]
                    .iter()
                    .map(|t| {
                        let mut node = json!({"id": t.id, "comments": comment_page(t, count, None)});
                        if op == "PullRequestThreads" {
                            node["author"] = json!({"login": "author"});
                            node["createdAt"] = json!(ts(-1));
                            node["body"] = json!("description");
                        }
                        node
                    })
                    .collect();
                json!({"repository": {"threads": {"pageInfo": {"hasNextPage": end < threads.len(), "endCursor": end.to_string()}, "nodes": nodes}}})
            }
            "ThreadComments" => {
                let id = v["id"].as_str().unwrap();
                let t = self.issues.iter().chain(&self.pulls).find(|t| t.id == id).unwrap();
                let before = v["before"].as_str().map(|c| c.parse::<usize>().unwrap());
                json!({"node": {"comments": comment_page(t, v["count"].as_u64().unwrap() as usize, before)}})
            }
            other => return Err(TransportFailure(format!("unknown operation {other}"))),
        };
        Ok(HttpResponse {
            status: 200,
            headers: BTreeMap::new(),
            body: json!({ "data": data }).to_string(),
        })
    }
}

fn thread_strategy(prefix: &'static str) -> impl Strategy<Value = Vec<SimThread>> {
    prop::collection::vec(prop::collection::vec(0i64..100_000, 0..12), 0..9).prop_map(move |lists| {
        lists
            .into_iter()
            .enumerate()
            .map(|(i, mut comments)| {
                comments.sort_unstable();
                SimThread {
                    id: format!("{prefix}{i:02}"),
                    comments,
                }
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fetch_respects_caps_and_keeps_most_recent(
        issues in thread_strategy("I"),
        pulls in thread_strategy("P"),
        threads in 1usize..8,
        per_thread in 1usize..6,
        page_size in 1usize..4,
    ) {
        let repo = SimRepo { issues, pulls };
        let limits = FetchLimits { threads, comments_per_thread: per_thread, page_size };
        let client = GithubClient::new(repo.clone());
        let got = client.fetch_repository_comments("acme/widgets", &limits).unwrap();

        let mut expected = BTreeSet::new();
        for t in repo.issues.iter().take(threads).chain(repo.pulls.iter().take(threads)) {
            let n = t.comments.len();
            for i in n.saturating_sub(per_thread)..n {
                expected.insert(format!("{}-c{i:03}", t.id));
            }
        }
        for t in repo.pulls.iter().take(threads) {
            expected.insert(t.id.clone());
        }
        let ids: BTreeSet<String> = got.iter().map(|c| c.id.clone()).collect();
        prop_assert_eq!(ids.len(), got.len());
        prop_assert_eq!(ids, expected);

        let descriptions = got.iter().filter(|c| c.is_description).count();
        prop_assert_eq!(descriptions, repo.pulls.len().min(threads));
        prop_assert!(got.iter().filter(|c| c.thread_kind == ThreadKind::Issue && !c.is_description).count() <= threads * per_thread);
        prop_assert!(got.windows(2).all(|w| w[0].created_at >= w[1].created_at));
    }
}
