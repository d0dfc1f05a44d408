#![allow(dead_code)]

use std::path::Path;

use chrono::{Duration, TimeZone, Utc};

use botgate_core::corpus::{write_corpus, RawComment, ThreadKind};

pub fn comment(author: &str, i: usize, body: &str) -> RawComment {
    RawComment {
        id: format!("{author}-{i:03}"),
        repository: "acme/widgets".into(),
        thread_kind: ThreadKind::Issue,
        is_description: false,
        author: author.into(),
        created_at: Utc.with_ymd_and_hms(2022, 3, 1, 0, 0, 0).unwrap() + Duration::hours(i as i64),
        body: body.into(),
    }
}

const PROSE: [&str; 12] = [
    "The parser panics on an empty config file, see the trace below.",
    "I think we should split this module before adding more options.",
    "Could you rebase on main? The CI fix landed yesterday.",
    "Benchmarks show a small regression on the hot path after this change.",
    "Why does the docs example use the deprecated method here?",
    "Works for me locally on linux, but the windows runner times out.",
    "Nit: the variable name does not match the rest of the crate.",
    "Agreed, let us keep the old behaviour behind a flag for one release.",
    "This breaks the public API, so it needs a major version bump.",
    "Thanks for the report, I can reproduce it with the attached file.",
    "Maybe a retry with backoff is enough for the flaky network test?",
    "Closing since the question was answered in the discussion thread.",
];

/// A bot posting one message ten times, a human writing distinct prose, and
/// an account with only nine comments.
pub fn small_corpus() -> Vec<RawComment> {
    let mut c = Vec::new();
    for i in 0..10 {
        c.push(comment("echo-bot", i, "Build passed. All checks are green."));
    }
    for (i, p) in PROSE.iter().enumerate() {
        c.push(comment("dana", i, p));
    }
    for (i, p) in PROSE.iter().take(9).enumerate() {
        c.push(comment("brief", i, p));
    }
    c
}

pub fn write_small_corpus(path: &Path) {
    write_corpus(path, &small_corpus()).unwrap();
}
