//! Deterministic synthetic corpus used for the reference model and the
//! end-to-end tests.
//!
//! Bot accounts post from a few message templates whose slots are filled
//! with random values (coverage reports, dependency bumps, CI summaries...).
//! Human accounts write free-form sentences drawn from a vocabulary, with the
//! occasional short stock reply and empty PR description. A small share of
//! both populations is "quiet": almost every comment is empty, which makes
//! them hard to tell apart.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RawComment, ThreadKind};
use crate::model::Label;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub accounts: usize,
    pub bot_fraction: f64,
    /// Share of each class that posts almost only empty comments.
    pub quiet_fraction: f64,
    pub min_comments: usize,
    pub max_comments: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            accounts: 400,
            bot_fraction: 0.1,
            quiet_fraction: 0.04,
            min_comments: 10,
            max_comments: 80,
            seed: 20_220_401,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub comments: Vec<RawComment>,
    pub labels: BTreeMap<String, Label>,
}

const REPOSITORIES: [&str; 12] = [
    "acme/widgets",
    "acme/gadgets",
    "orbital/launchpad",
    "orbital/telemetry",
    "greenleaf/garden",
    "greenleaf/compost",
    "nimbus/cloudctl",
    "nimbus/sdk",
    "quill/editor",
    "quill/spellcheck",
    "harbor/registry",
    "harbor/proxy",
];

const BOT_TEMPLATES: [&str; 14] = [
    "Coverage {dir} ({delta}%) to {pct}% when pulling **{sha}** on {branch} into **{sha2}** on main.",
    "Bumps {pkg} from {v1} to {v2}.\n\nRelease notes are available in the {pkg} changelog.",
    "Thanks for your pull request. Before we can look at it, please sign the Contributor License Agreement at https://cla.example.org/{num}.",
    "Build #{num} {status}: {passed} tests passed, {failed} failed. Details: https://ci.example.org/builds/{num}",
    "This issue has been automatically marked as stale because it has not had recent activity. It will be closed in {days} days if no further activity occurs.",
    "Deploy preview for {branch} ready! Built with commit {sha}. https://preview-{num}.example.app",
    "Hi @{user}, thanks for opening this issue! A maintainer will triage it soon. Please make sure you have read the contributing guide.",
    ":white_check_mark: All checks passed for {sha}. Merging into main in {days} minutes.",
    "Codecov Report: Merging #{num} into main will {dir} coverage by {delta}%. The diff coverage is {pct}%.",
    "The label `{label}` was added by a rule. Ping @{user} if this was a mistake.",
    "Backport to {branch} failed. Please cherry-pick {sha} manually.",
    "Closing this pull request because the base branch {branch} was deleted.",
    "New release {v2} has been published. Download it from https://releases.example.org/{pkg}/{v2}",
    "Lock file maintenance: updated {num} dependencies in {branch}.",
];

const STOCK_REPLIES: [&str; 12] = [
    "LGTM",
    "Thanks!",
    "+1",
    "Done.",
    "Fixed in the latest commit.",
    "Good catch, thanks!",
    "Merged, thanks for the contribution.",
    "Any update on this?",
    "lgtm",
    "Rebased on main.",
    "Closing as duplicate.",
    "Ping.",
];

const WORDS: [&str; 160] = [
    "the", "build", "fails", "when", "compiling", "against", "latest", "release", "parser", "crash",
    "memory", "leak", "during", "startup", "config", "file", "missing", "option", "flag", "error",
    "message", "unclear", "docs", "should", "mention", "this", "case", "example", "works", "locally",
    "but", "not", "on", "windows", "linux", "macos", "runner", "timeout", "after", "upgrade",
    "version", "regression", "since", "commit", "could", "you", "share", "logs", "stack", "trace",
    "refactor", "module", "split", "into", "smaller", "functions", "naming", "consistent", "with", "rest",
    "api", "breaking", "change", "deprecate", "method", "instead", "prefer", "iterator", "allocation", "hot",
    "path", "benchmark", "shows", "improvement", "percent", "slower", "faster", "cache", "invalidation", "race",
    "condition", "thread", "lock", "deadlock", "async", "runtime", "blocking", "call", "inside", "handler",
    "test", "flaky", "ci", "retry", "skip", "ignore", "snapshot", "update", "fixture", "mock",
    "server", "client", "request", "response", "header", "encoding", "utf8", "unicode", "escape", "quote",
    "json", "yaml", "schema", "validation", "field", "optional", "default", "value", "null", "empty",
    "agree", "disagree", "maybe", "we", "can", "merge", "once", "review", "approved", "nit",
    "typo", "wording", "comment", "above", "below", "line", "rename", "variable", "struct", "trait",
    "generic", "lifetime", "borrow", "clone", "copy", "unsafe", "pointer", "index", "bounds", "overflow",
    "i", "think", "looks", "good", "except", "minor", "issue", "here", "there", "again",
];

const PACKAGES: [&str; 10] = [
    "serde", "tokio", "lodash", "requests", "numpy", "express", "junit", "guava", "rails", "pytest",
];
const BRANCHES: [&str; 6] = ["main", "develop", "release-1.x", "feature/api", "fix/ci", "next"];
const LABELS: [&str; 5] = ["bug", "needs-triage", "enhancement", "question", "dependencies"];

fn hex(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len)
        .map(|_| char::from_digit(rng.random_range(0..16), 16).unwrap())
        .collect()
}

fn version(rng: &mut ChaCha8Rng) -> String {
    format!(
        "{}.{}.{}",
        rng.random_range(0..5),
        rng.random_range(0..30),
        rng.random_range(0..20)
    )
}

fn fill_template(template: &str, rng: &mut ChaCha8Rng) -> String {
    let pkg = *PACKAGES.choose(rng).unwrap();
    let mut out = template.to_string();
    let slots: [(&str, String); 15] = [
        ("{dir}", ["increased", "decreased"].choose(rng).unwrap().to_string()),
        ("{delta}", format!("{:.2}", rng.random_range(0.0..3.0))),
        ("{pct}", format!("{:.3}", rng.random_range(60.0..99.0))),
        ("{sha2}", hex(rng, 7)),
        ("{sha}", hex(rng, 7)),
        ("{branch}", BRANCHES.choose(rng).unwrap().to_string()),
        ("{pkg}", pkg.to_string()),
        ("{v1}", version(rng)),
        ("{v2}", version(rng)),
        ("{num}", rng.random_range(100..99_999).to_string()),
        ("{status}", ["passed", "failed", "errored"].choose(rng).unwrap().to_string()),
        ("{passed}", rng.random_range(10..2_000).to_string()),
        ("{failed}", rng.random_range(0..40).to_string()),
        ("{days}", rng.random_range(2..30).to_string()),
        ("{user}", format!("contrib{}", rng.random_range(1..500))),
    ];
    for (slot, value) in slots {
        out = out.replace(slot, &value);
    }
    out.replace("{label}", LABELS.choose(rng).unwrap())
}

fn human_sentence(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(5..16);
    let mut words: Vec<String> = (0..len).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
    if let Some(first) = words.first_mut() {
        let mut c = first.chars();
        if let Some(h) = c.next() {
            *first = h.to_uppercase().chain(c).collect();
        }
    }
    let end = ['.', '.', '.', '?', '!'].choose(rng).copied().unwrap();
    format!("{}{}", words.join(" "), end)
}

fn human_comment(rng: &mut ChaCha8Rng) -> String {
    let sentences = rng.random_range(1..4);
    (0..sentences)
        .map(|_| human_sentence(rng))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Persona {
    Bot,
    QuietBot,
    Human,
    QuietHuman,
}

/// Draws a comment count skewed toward the lower end of the range.
fn comment_count(rng: &mut ChaCha8Rng, min: usize, max: usize) -> usize {
    let u: f64 = rng.random();
    min + ((max - min) as f64 * u * u).round() as usize
}

fn bodies_for(persona: Persona, n: usize, rng: &mut ChaCha8Rng) -> Vec<(String, bool)> {
    match persona {
        Persona::Bot => {
            let n_templates = rng.random_range(1..=3);
            let templates: Vec<&str> = BOT_TEMPLATES.choose_multiple(rng, n_templates).copied().collect();
            // uneven template usage, first template dominates
            let weights: Vec<f64> = (0..n_templates).map(|i| 1.0 / (1 + 2 * i) as f64).collect();
            let total: f64 = weights.iter().sum();
            let empty_rate = if rng.random_bool(0.3) { 0.15 } else { 0.0 };
            (0..n)
                .map(|_| {
                    if rng.random_bool(empty_rate) {
                        return (String::new(), true);
                    }
                    let mut pick = rng.random_range(0.0..total);
                    let mut t = templates[0];
                    for (tpl, w) in templates.iter().zip(&weights) {
                        if pick < *w {
                            t = tpl;
                            break;
                        }
                        pick -= w;
                    }
                    (fill_template(t, rng), false)
                })
                .collect()
        }
        Persona::QuietBot => {
            let template = *BOT_TEMPLATES.choose(rng).unwrap();
            let non_empty = rng.random_range(0..=4).min(n);
            (0..n)
                .map(|i| {
                    if i < non_empty {
                        (fill_template(template, rng), false)
                    } else {
                        (String::new(), true)
                    }
                })
                .collect()
        }
        Persona::Human => {
            let empty_rate = rng.random_range(0.0..0.2);
            let stock_rate = rng.random_range(0.0..0.12);
            (0..n)
                .map(|_| {
                    if rng.random_bool(empty_rate) {
                        (["", " ", "\n"].choose(rng).unwrap().to_string(), true)
                    } else if rng.random_bool(stock_rate) {
                        (STOCK_REPLIES.choose(rng).unwrap().to_string(), false)
                    } else {
                        (human_comment(rng), false)
                    }
                })
                .collect()
        }
        Persona::QuietHuman => {
            let non_empty = rng.random_range(0..=4).min(n);
            (0..n)
                .map(|i| {
                    if i < non_empty {
                        (STOCK_REPLIES.choose(rng).unwrap().to_string(), false)
                    } else {
                        (String::new(), true)
                    }
                })
                .collect()
        }
    }
}

/// Generates the corpus. Identical configs produce identical corpora.
pub fn generate(config: &SyntheticConfig) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_bots = (config.accounts as f64 * config.bot_fraction).round() as usize;
    let n_humans = config.accounts - n_bots;
    let quiet_bots = (n_bots as f64 * config.quiet_fraction).round() as usize;
    let quiet_humans = (n_humans as f64 * config.quiet_fraction).round() as usize;

    let mut personas = Vec::with_capacity(config.accounts);
    personas.extend(std::iter::repeat_n(Persona::QuietBot, quiet_bots));
    personas.extend(std::iter::repeat_n(Persona::Bot, n_bots - quiet_bots));
    personas.extend(std::iter::repeat_n(Persona::QuietHuman, quiet_humans));
    personas.extend(std::iter::repeat_n(Persona::Human, n_humans - quiet_humans));
    personas.shuffle(&mut rng);

    let epoch: DateTime<Utc> = Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap();
    let mut comments = Vec::new();
    let mut labels = BTreeMap::new();
    for (a, persona) in personas.into_iter().enumerate() {
        let account = format!("account-{a:04}");
        let label = match persona {
            Persona::Bot | Persona::QuietBot => Label::Bot,
            Persona::Human | Persona::QuietHuman => Label::Human,
        };
        labels.insert(account.clone(), label);
        let n = comment_count(&mut rng, config.min_comments, config.max_comments);
        let home = rng.random_range(0..REPOSITORIES.len());
        for (i, (body, maybe_description)) in bodies_for(persona, n, &mut rng).into_iter().enumerate() {
            let repository = if rng.random_bool(0.8) {
                REPOSITORIES[home]
            } else {
                REPOSITORIES.choose(&mut rng).unwrap()
            };
            let is_description = maybe_description || rng.random_bool(0.1);
            comments.push(RawComment {
                id: format!("c{:03}{:05}", a, i),
                repository: repository.to_string(),
                thread_kind: if is_description || rng.random_bool(0.5) {
                    ThreadKind::PullRequest
                } else {
                    ThreadKind::Issue
                },
                is_description,
                author: account.clone(),
                created_at: epoch + Duration::minutes(rng.random_range(0..525_600)),
                body,
            });
        }
    }
    SyntheticCorpus { comments, labels }
}
