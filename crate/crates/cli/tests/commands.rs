//! The `botgate` binary: exit codes, output formats and file handling.

mod common;

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::thread;

use serde_json::{json, Value};

use common::*;

fn botgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_botgate"))
        .args(args)
        .env_remove("BOTGATE_GITHUB_TOKEN")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Serves canned GraphQL answers chosen by operation name until the test
/// process exits. Returns the endpoint URL.
fn mock_github(answer: fn(&str) -> (u16, Value)) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/graphql", listener.local_addr().unwrap());
    thread::spawn(move || {
        for stream in listener.incoming() {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    if k.eq_ignore_ascii_case("content-length") {
                        length = v.trim().parse().unwrap();
                    }
                }
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            let request: Value = serde_json::from_slice(&body).unwrap();
            let (status, payload) = answer(request["operationName"].as_str().unwrap_or_default());
            let payload = payload.to_string();
            let _ = write!(
                stream,
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{payload}",
                payload.len()
            );
        }
    });
    url
}

fn repo_with_one_bot(op: &str) -> (u16, Value) {
    let empty_page = json!({"pageInfo": {"hasNextPage": false, "endCursor": null}, "nodes": []});
    match op {
        "IssueThreads" => {
            let nodes: Vec<Value> = (0..12)
                .map(|i| json!({"id": format!("IC_{i}"), "author": {"login": "ci-helper[bot]"}, "createdAt": format!("2022-05-01T00:{i:02}:00Z"), "body": "Build passed. All checks are green."}))
                .collect();
            (200, json!({"data": {"repository": {"threads": {"pageInfo": {"hasNextPage": false, "endCursor": null}, "nodes": [
                {"id": "I_1", "comments": {"pageInfo": {"hasPreviousPage": false, "startCursor": null}, "nodes": nodes}}
            ]}}}}))
        }
        _ => (200, json!({"data": {"repository": {"threads": empty_page}}})),
    }
}

#[test]
fn predict_from_a_repository() {
    let url = mock_github(repo_with_one_bot);
    let o = botgate(&["predict", "--repo", "acme/widgets", "-k", "secret", "--api-url", &url, "--output-format", "csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let expected = botgate_cli::predict::reference_model().predict_values(&[12.0, 0.0, 1.0, 0.0]);
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        format!("ci-helper[bot],12,0,1,0.0000,{},{:.4}", expected.label, expected.score)
    );
}

#[test]
fn github_failures_map_to_exit_codes() {
    let denied = mock_github(|_| (401, json!({"message": "Bad credentials"})));
    let o = botgate(&["predict", "--repo", "acme/widgets", "-k", "wrong", "--api-url", &denied]);
    assert_eq!(code(&o), 2);
    let missing = mock_github(|_| {
        (200, json!({"data": {"repository": null}, "errors": [{"type": "NOT_FOUND", "message": "Could not resolve to a Repository"}]}))
    });
    let o = botgate(&["predict", "--repo", "acme/nope", "-k", "secret", "--api-url", &missing]);
    assert_eq!(code(&o), 3);
    // no token at all
    let o = botgate(&["predict", "--repo", "acme/widgets", "--api-url", &missing]);
    assert_eq!(code(&o), 2);
    // token from the environment
    let o = Command::new(env!("CARGO_BIN_EXE_botgate"))
        .args(["predict", "--repo", "acme/nope", "--api-url", &missing])
        .env("BOTGATE_GITHUB_TOKEN", "secret")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    let o = botgate(&["predict", "--repo", "bad//name", "-k", "secret", "--api-url", "http://127.0.0.1:9/"]);
    assert_eq!(code(&o), 64);
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_small_corpus(&corpus);
    assert_eq!(code(&botgate(&["predict"])), 64);
    assert_eq!(code(&botgate(&["predict", "--corpus", p(&corpus), "--repo", "a/b"])), 64);
    assert_eq!(code(&botgate(&["predict", "--corpus", p(&corpus), "--min-comments", "20", "--max-comments", "5"])), 64);
    assert_eq!(code(&botgate(&["predict", "--corpus", p(&corpus), "--eps", "1.5"])), 64);
    assert_eq!(code(&botgate(&["predict", "--corpus", p(&corpus), "--output-format", "xml"])), 64);
    assert_eq!(code(&botgate(&["frobnicate"])), 64);
    assert_eq!(code(&botgate(&["--help"])), 0);
}

#[test]
fn predict_from_a_corpus_file() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_small_corpus(&corpus);
    let o = botgate(&["predict", "--corpus", p(&corpus)]);
    assert_eq!(code(&o), 0);
    let table = stdout(&o);
    let lines: Vec<&str> = table.lines().collect();
    assert!(lines[0].starts_with("account"));
    assert!(lines[1].starts_with("brief") && lines[1].contains("unknown (insufficient comments)"));
    assert!(lines[3].starts_with("echo-bot") && lines[3].contains(" bot "));

    let json: Value = serde_json::from_slice(&botgate(&["predict", "--corpus", p(&corpus), "--output-format", "json"]).stdout).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        for field in ["account", "total_comments", "empty_comments", "pattern_count", "gini_patterns", "prediction", "score"] {
            assert!(row.get(field).is_some(), "{field} missing");
        }
    }
    // the allow-list narrows the rows
    let o = botgate(&["predict", "--corpus", p(&corpus), "--accounts", "dana", "--output-format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn predict_is_stable_and_leaves_the_model_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_small_corpus(&corpus);
    let model = dir.path().join("model.json");
    std::fs::write(&model, include_str!("../data/reference-model.json")).unwrap();
    let before = std::fs::read(&model).unwrap();
    let modified = std::fs::metadata(&model).unwrap().modified().unwrap();
    let a = botgate(&["predict", "--corpus", p(&corpus), "--model", p(&model), "--output-format", "json"]);
    let b = botgate(&["predict", "--corpus", p(&corpus), "--model", p(&model), "--output-format", "json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&model).unwrap(), before);
    assert_eq!(std::fs::metadata(&model).unwrap().modified().unwrap(), modified);
    // the bundled model gives the same answer
    let c = botgate(&["predict", "--corpus", p(&corpus), "--output-format", "json"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn model_and_io_failures() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_small_corpus(&corpus);
    let missing_model = dir.path().join("none.json");
    assert_eq!(code(&botgate(&["predict", "--corpus", p(&corpus), "--model", p(&missing_model)])), 4);
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"trees\": 3}").unwrap();
    assert_eq!(code(&botgate(&["predict", "--corpus", p(&corpus), "--model", p(&broken)])), 4);
    assert_eq!(code(&botgate(&["predict", "--corpus", p(&dir.path().join("absent.jsonl"))])), 5);
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\": 1}\n").unwrap();
    assert_eq!(code(&botgate(&["predict", "--corpus", p(&bad)])), 5);
}

#[test]
fn export_train_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name);
    let o = botgate(&["synth-corpus", "--out", p(&d("corpus.jsonl")), "--labels-out", p(&d("labels.csv")), "--accounts", "120", "--seed", "5"]);
    assert_eq!(code(&o), 0);
    let o = botgate(&["export-features", "--corpus", p(&d("corpus.jsonl")), "--labels", p(&d("labels.csv")), "-o", p(&d("features.csv"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let features = std::fs::read_to_string(d("features.csv")).unwrap();
    assert_eq!(features.lines().count(), 121);
    assert!(features.starts_with("account,total_comments,empty_comments,pattern_count,gini_patterns,label\n"));

    std::fs::write(d("grid.json"), r#"{"random_forest": {"n_trees": [5, 10], "max_depth": [5], "features_per_split": [2]}, "zero_r": true}"#).unwrap();
    let train = |model: &str, report: &str| {
        botgate(&[
            "train", "--features", p(&d("features.csv")), "--model-out", p(&d(model)), "--report", p(&d(report)),
            "--grid", p(&d("grid.json")), "--folds", "4", "--tables", p(&d("tables")), "--audit", p(&d("audit.json")),
        ])
    };
    let first = train("m1.json", "r1.json");
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let second = train("m2.json", "r2.json");
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read(d("m1.json")).unwrap(), std::fs::read(d("m2.json")).unwrap());
    assert_eq!(std::fs::read(d("r1.json")).unwrap(), std::fs::read(d("r2.json")).unwrap());
    for table in ["cross_validation.csv", "confusion.csv", "metrics.csv", "bins.csv"] {
        assert!(d("tables").join(table).exists());
    }
    let report: Value = serde_json::from_slice(&std::fs::read(d("r1.json")).unwrap()).unwrap();
    assert_eq!(report["cross_validation"].as_array().unwrap().len(), 3);
    assert_eq!(report["test"]["bots"].as_u64().unwrap() + report["test"]["humans"].as_u64().unwrap(), 48);

    let o = botgate(&["evaluate", "--features", p(&d("features.csv")), "--model", p(&d("m1.json")), "--output-format", "json"]);
    assert_eq!(code(&o), 0);
    let eval: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(eval["examples"], 120);
    assert!(eval["metrics"]["f1"].as_f64().unwrap() > 0.5);

    // feature columns in another order
    let swapped = features.replacen("pattern_count,gini_patterns", "gini_patterns,pattern_count", 1);
    std::fs::write(d("swapped.csv"), swapped).unwrap();
    assert_eq!(code(&botgate(&["evaluate", "--features", p(&d("swapped.csv")), "--model", p(&d("m1.json"))])), 4);
}

#[test]
fn ground_truth_export_and_rating_server() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name);
    write_small_corpus(&d("corpus.jsonl"));
    std::fs::write(
        d("raters.json"),
        r#"{"salt": "s", "raters": [
            {"id": "ann", "token": "t-ann"},
            {"id": "ben", "token": "t-ben", "roles": ["rater", "adjudicator"]}
        ]}"#,
    )
    .unwrap();
    let (config, corpus, log) = (d("raters.json"), d("corpus.jsonl"), d("ratings.jsonl"));
    let rating = ["--config", p(&config), "--corpus", p(&corpus), "--log", p(&log)];

    let mut child = Command::new(env!("CARGO_BIN_EXE_botgate"))
        .arg("serve-rating")
        .args(rating)
        .args(["--port", "0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut announce = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut announce).unwrap();
    let base = announce.trim().strip_prefix("listening on ").unwrap().to_string();
    let client = reqwest::blocking::Client::new();
    let result = (|| {
        for token in ["t-ann", "t-ben"] {
            loop {
                let batch: Value = client.get(format!("{base}/api/next")).bearer_auth(token).send()?.json()?;
                if batch["done"] == true {
                    break;
                }
                assert_eq!(batch["round"], 1);
                let body = json!({"account_ref": batch["account_ref"], "verdict": "human", "difficulty": "easy"});
                let resp = client.post(format!("{base}/api/ratings")).bearer_auth(token).json(&body).send()?;
                assert!(resp.status().is_success());
            }
        }
        let agreement: Value = client.get(format!("{base}/api/agreement")).bearer_auth("t-ann").send()?.json()?;
        let csv = client.get(format!("{base}/api/export?format=csv")).bearer_auth("t-ben").send()?.text()?;
        Ok::<_, reqwest::Error>((agreement, csv))
    })();
    child.kill().unwrap();
    child.wait().unwrap();
    let (agreement, csv) = result.unwrap();
    assert_eq!(agreement["agreed_human"], 2);
    assert_eq!(csv, "repository,account,label\nacme/widgets,dana,human\nacme/widgets,echo-bot,human\n");

    // offline export rebuilds the same state from the log
    let o = botgate(&[&["export-ground-truth"][..], &rating, &["--out", p(&d("truth.csv"))]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(d("truth.csv")).unwrap(), csv);
    assert_eq!(std::fs::read_to_string(d("truth.excluded.csv")).unwrap(), "account,status,repositories\n");
}
