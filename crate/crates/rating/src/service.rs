use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use botgate_core::corpus::AccountActivity;
use botgate_core::eval::cohens_kappa;

use crate::anonymize::{account_ref, identifying_terms, redact};
use crate::config::{RaterEntry, Role, ServiceConfig};
use crate::RatingError;

/// Comments shown per request.
pub const BATCH_SIZE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bot,
    Human,
    Unknown,
    /// Round-2 only: a human account through which tools also post.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    VeryEasy,
    Easy,
    Difficult,
    VeryDifficult,
}

impl Difficulty {
    pub fn is_hard(self) -> bool {
        matches!(self, Difficulty::Difficult | Difficulty::VeryDifficult)
    }
}

macro_rules! snake_case_from_str {
    ($ty:ty, $what:literal) => {
        impl FromStr for $ty {
            type Err = RatingError;
            fn from_str(s: &str) -> Result<Self, RatingError> {
                serde_json::from_value(serde_json::Value::String(s.to_string()))
                    .map_err(|_| RatingError::Validation(format!("invalid {} {s:?}", $what)))
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match serde_json::to_value(self) {
                    Ok(serde_json::Value::String(s)) => f.write_str(&s),
                    _ => Err(fmt::Error),
                }
            }
        }
    };
}

snake_case_from_str!(Verdict, "verdict");
snake_case_from_str!(Difficulty, "difficulty");

/// One persisted verdict. `seq` orders records across the whole log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatingRecord {
    pub seq: u64,
    pub rater_id: String,
    pub account_ref: String,
    pub verdict: Verdict,
    pub difficulty: Difficulty,
    pub round: u8,
    pub timestamp: DateTime<Utc>,
}

/// Body of `POST /api/ratings`. Enum fields are kept as strings so that
/// invalid values surface as validation errors rather than parse failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitRequest {
    pub account_ref: String,
    pub verdict: String,
    pub difficulty: String,
    #[serde(default)]
    pub round: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Acknowledgment {
    pub seq: u64,
    pub account_ref: String,
    pub round: u8,
    /// Number of submissions this rater made for this account and round.
    pub revision: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShownComment {
    pub body: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorVerdict {
    pub verdict: Verdict,
    pub difficulty: Difficulty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub rated: usize,
    pub total: usize,
    pub round2_pending: usize,
}

/// Response of `GET /api/next`. When `done` is true no account is left and
/// the batch fields are absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextBatch {
    pub done: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub account_ref: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comments: Vec<ShownComment>,
    #[serde(default)]
    pub has_more: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub next_cursor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_comments: Option<usize>,
    /// Round-1 verdicts, shown to adjudicators in round 2.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prior_verdicts: Vec<PriorVerdict>,
    pub progress: Progress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueReason {
    Disagreement,
    AgreedUnknown,
    MarkedDifficult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AccountStatus {
    /// Not every assigned rater has answered yet.
    Pending { rated: usize, needed: usize },
    /// Concordant bot/human verdicts, none marked difficult.
    Agreed { label: Verdict },
    /// Waiting for an adjudicator.
    Round2 { reasons: Vec<QueueReason> },
    Resolved { label: Verdict },
}

impl AccountStatus {
    /// The final label, if any.
    pub fn label(&self) -> Option<Verdict> {
        match self {
            AccountStatus::Agreed { label } | AccountStatus::Resolved { label } => Some(*label),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAgreement {
    pub rater_a: String,
    pub rater_b: String,
    pub items: usize,
    pub kappa: f64,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueEntry {
    pub account_ref: String,
    pub reasons: Vec<QueueReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub pairs: Vec<PairAgreement>,
    pub accounts: usize,
    pub pending: usize,
    pub agreed_bot: usize,
    pub agreed_human: usize,
    pub agreed_unknown: usize,
    pub disagreements: usize,
    /// Concordant accounts still queued because a rater marked them difficult.
    pub agreed_but_difficult: usize,
    pub round2_queue: Vec<QueueEntry>,
    pub resolved: usize,
    pub ground_truth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundTruthRow {
    pub repository: String,
    pub account: String,
    pub label: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExcludedAccount {
    pub account: String,
    /// `mixed` or `unresolved`.
    pub status: String,
    pub repositories: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthExport {
    pub rows: Vec<GroundTruthRow>,
    pub excluded: Vec<ExcludedAccount>,
}

impl GroundTruthExport {
    /// `repository,account,label`, header included even when empty.
    pub fn rows_csv(&self) -> Result<String, RatingError> {
        to_csv(&["repository", "account", "label"], &self.rows)
    }

    /// `account,status,repositories` with repositories joined by `;`.
    pub fn excluded_csv(&self) -> Result<String, RatingError> {
        to_csv(&["account", "status", "repositories"], &self.excluded)
    }
}

fn to_csv<R: Serialize>(header: &[&str], rows: &[R]) -> Result<String, RatingError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let io = |e: csv::Error| RatingError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| RatingError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| RatingError::Io(e.to_string()))
}

#[derive(Debug, Clone)]
struct AccountEntry {
    account: String,
    repositories: BTreeSet<String>,
    /// Redacted, most recent first.
    comments: Vec<ShownComment>,
    assigned: Vec<String>,
}

type Key = (String, String, u8);

/// Derived state: the latest record per (rater, account, round) and how many
/// submissions led to it. Equal logs give equal states.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingState {
    pub last_seq: u64,
    pub latest: Vec<RatingRecord>,
    pub revisions: Vec<usize>,
}

pub struct RatingService {
    config: ServiceConfig,
    accounts: BTreeMap<String, AccountEntry>,
    latest: BTreeMap<Key, RatingRecord>,
    revisions: BTreeMap<Key, usize>,
    last_seq: u64,
}

impl RatingService {
    /// Builds the service over the accounts to rate. Accounts are assigned
    /// round-robin, in reference order, to `raters_per_account` raters.
    pub fn new(config: ServiceConfig, accounts: &[AccountActivity]) -> Result<Self, RatingError> {
        config.validate()?;
        let raters: Vec<&RaterEntry> = {
            let mut r: Vec<&RaterEntry> = config.raters.iter().filter(|r| r.roles.contains(&Role::Rater)).collect();
            r.sort_by(|a, b| a.id.cmp(&b.id));
            r
        };
        let mut by_ref = BTreeMap::new();
        for a in accounts {
            let reference = account_ref(&config.salt, a.account());
            let terms = identifying_terms(a.account(), a.repositories().iter().map(String::as_str));
            let comments = a
                .comments()
                .iter()
                .map(|c| ShownComment {
                    body: redact(&c.body, &terms),
                    created_at: Some(c.created_at),
                })
                .collect();
            let entry = AccountEntry {
                account: a.account().to_string(),
                repositories: a.repositories().clone(),
                comments,
                assigned: Vec::new(),
            };
            if by_ref.insert(reference.clone(), entry).is_some() {
                return Err(RatingError::Config(format!("account reference collision on {reference}")));
            }
        }
        for (i, entry) in by_ref.values_mut().enumerate() {
            entry.assigned = (0..config.raters_per_account)
                .map(|j| raters[(i + j) % raters.len()].id.clone())
                .collect();
        }
        Ok(Self {
            config,
            accounts: by_ref,
            latest: BTreeMap::new(),
            revisions: BTreeMap::new(),
            last_seq: 0,
        })
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn authenticate(&self, token: &str) -> Result<&RaterEntry, RatingError> {
        self.config.rater_by_token(token).ok_or(RatingError::Unauthorized)
    }

    pub fn account_refs(&self) -> impl Iterator<Item = &str> {
        self.accounts.keys().map(String::as_str)
    }

    pub fn assigned_raters(&self, reference: &str) -> Option<&[String]> {
        self.accounts.get(reference).map(|a| a.assigned.as_slice())
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    fn rater(&self, rater_id: &str) -> Result<&RaterEntry, RatingError> {
        self.config
            .raters
            .iter()
            .find(|r| r.id == rater_id)
            .ok_or(RatingError::Unauthorized)
    }

    fn is_adjudicator(&self, rater_id: &str) -> bool {
        self.rater(rater_id).is_ok_and(|r| r.roles.contains(&Role::Adjudicator))
    }

    fn round1_verdicts(&self, reference: &str, entry: &AccountEntry) -> Vec<&RatingRecord> {
        entry
            .assigned
            .iter()
            .filter_map(|r| self.latest.get(&(r.clone(), reference.to_string(), 1)))
            .collect()
    }

    fn resolution(&self, reference: &str) -> Option<Verdict> {
        self.latest
            .iter()
            .filter(|((_, a, round), r)| a == reference && *round == 2 && r.verdict != Verdict::Unknown)
            .max_by_key(|(_, r)| r.seq)
            .map(|(_, r)| r.verdict)
    }

    pub fn status(&self, reference: &str) -> Option<AccountStatus> {
        let entry = self.accounts.get(reference)?;
        let verdicts = self.round1_verdicts(reference, entry);
        if verdicts.len() < entry.assigned.len() {
            return Some(AccountStatus::Pending {
                rated: verdicts.len(),
                needed: entry.assigned.len(),
            });
        }
        let first = verdicts[0].verdict;
        let concordant = verdicts.iter().all(|r| r.verdict == first);
        let mut reasons = Vec::new();
        if !concordant {
            reasons.push(QueueReason::Disagreement);
        } else if first == Verdict::Unknown {
            reasons.push(QueueReason::AgreedUnknown);
        }
        if verdicts.iter().any(|r| r.difficulty.is_hard()) {
            reasons.push(QueueReason::MarkedDifficult);
        }
        if reasons.is_empty() {
            return Some(AccountStatus::Agreed { label: first });
        }
        Some(match self.resolution(reference) {
            Some(label) => AccountStatus::Resolved { label },
            None => AccountStatus::Round2 { reasons },
        })
    }

    fn round2_pending(&self) -> Vec<&str> {
        self.accounts
            .keys()
            .filter(|r| matches!(self.status(r), Some(AccountStatus::Round2 { .. })))
            .map(String::as_str)
            .collect()
    }

    fn progress(&self, rater_id: &str) -> Progress {
        let assigned: Vec<&String> = self
            .accounts
            .iter()
            .filter(|(_, e)| e.assigned.iter().any(|r| r == rater_id))
            .map(|(k, _)| k)
            .collect();
        let rated = assigned
            .iter()
            .filter(|k| self.latest.contains_key(&(rater_id.to_string(), (**k).clone(), 1)))
            .count();
        Progress {
            rated,
            total: assigned.len(),
            round2_pending: if self.is_adjudicator(rater_id) {
                self.round2_pending().len()
            } else {
                0
            },
        }
    }

    /// The round in which `rater_id` may currently rate `reference`.
    fn open_round(&self, rater_id: &str, reference: &str) -> Result<u8, RatingError> {
        let entry = self
            .accounts
            .get(reference)
            .ok_or_else(|| RatingError::NotFound(format!("unknown account reference {reference}")))?;
        let in_round2 = matches!(
            self.status(reference),
            Some(AccountStatus::Round2 { .. } | AccountStatus::Resolved { .. })
        );
        if in_round2 && self.is_adjudicator(rater_id) {
            return Ok(2);
        }
        if entry.assigned.iter().any(|r| r == rater_id) {
            return Ok(1);
        }
        Err(RatingError::Forbidden(format!("account {reference} is not assigned to {rater_id}")))
    }

    /// Next batch for `rater_id`. Without a cursor this opens the rater's
    /// next unrated account (round 1 first, then the adjudication queue).
    pub fn next_batch(&self, rater_id: &str, cursor: Option<&str>) -> Result<NextBatch, RatingError> {
        self.rater(rater_id)?;
        let progress = self.progress(rater_id);
        let (reference, offset) = match cursor.filter(|c| !c.is_empty()) {
            Some(c) => parse_cursor(c)?,
            None => {
                let round1 = self.accounts.iter().find(|(k, e)| {
                    e.assigned.iter().any(|r| r == rater_id)
                        && !self.latest.contains_key(&(rater_id.to_string(), (*k).clone(), 1))
                });
                let next = match round1 {
                    Some((k, _)) => Some(k.clone()),
                    None if self.is_adjudicator(rater_id) => self.round2_pending().first().map(|s| s.to_string()),
                    None => None,
                };
                match next {
                    Some(k) => (k, 0),
                    None => {
                        return Ok(NextBatch {
                            done: true,
                            account_ref: None,
                            round: None,
                            offset: None,
                            comments: Vec::new(),
                            has_more: false,
                            next_cursor: None,
                            total_comments: None,
                            prior_verdicts: Vec::new(),
                            progress,
                        })
                    }
                }
            }
        };
        let round = self.open_round(rater_id, &reference)?;
        let entry = &self.accounts[&reference];
        let total = entry.comments.len();
        if offset > total {
            return Err(RatingError::Validation(format!("cursor offset {offset} beyond {total} comments")));
        }
        let end = (offset + BATCH_SIZE).min(total);
        let show_time = round == 2 && self.config.round2_timestamps;
        let comments = entry.comments[offset..end]
            .iter()
            .map(|c| ShownComment {
                body: c.body.clone(),
                created_at: if show_time { c.created_at } else { None },
            })
            .collect();
        let prior_verdicts = if round == 2 {
            self.round1_verdicts(&reference, entry)
                .into_iter()
                .map(|r| PriorVerdict {
                    verdict: r.verdict,
                    difficulty: r.difficulty,
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(NextBatch {
            done: false,
            has_more: end < total,
            next_cursor: (end < total).then(|| format!("{reference}:{end}")),
            account_ref: Some(reference),
            round: Some(round),
            offset: Some(offset),
            comments,
            total_comments: Some(total),
            prior_verdicts,
            progress,
        })
    }

    /// Validates a submission and turns it into the record to persist. The
    /// state is unchanged until [`RatingService::apply`] is called.
    pub fn prepare(
        &self,
        rater_id: &str,
        request: &SubmitRequest,
        now: DateTime<Utc>,
    ) -> Result<RatingRecord, RatingError> {
        self.rater(rater_id)?;
        let verdict: Verdict = request.verdict.parse()?;
        let difficulty: Difficulty = request.difficulty.parse()?;
        if let Some(r) = request.round {
            if r != 1 && r != 2 {
                return Err(RatingError::Validation(format!("invalid round {r}")));
            }
        }
        let open = self.open_round(rater_id, &request.account_ref)?;
        let round = match request.round {
            Some(2) if open != 2 => {
                return Err(RatingError::Forbidden(format!(
                    "account {} is not open for adjudication by {rater_id}",
                    request.account_ref
                )))
            }
            Some(1) if !self.accounts[&request.account_ref].assigned.iter().any(|r| r == rater_id) => {
                return Err(RatingError::Forbidden(format!(
                    "account {} is not assigned to {rater_id}",
                    request.account_ref
                )))
            }
            Some(r) => r,
            None => open,
        };
        if round == 1 && verdict == Verdict::Mixed {
            return Err(RatingError::Validation("verdict mixed is only accepted in round 2".into()));
        }
        Ok(RatingRecord {
            seq: self.last_seq + 1,
            rater_id: rater_id.to_string(),
            account_ref: request.account_ref.clone(),
            verdict,
            difficulty,
            round,
            timestamp: now,
        })
    }

    /// Applies a record taken from [`RatingService::prepare`] or read back
    /// from the log.
    pub fn apply(&mut self, record: RatingRecord) -> Result<Acknowledgment, RatingError> {
        if record.seq <= self.last_seq {
            return Err(RatingError::Log(format!(
                "record seq {} does not follow {}",
                record.seq, self.last_seq
            )));
        }
        if !self.accounts.contains_key(&record.account_ref) {
            return Err(RatingError::Log(format!(
                "record {} references unknown account {}",
                record.seq, record.account_ref
            )));
        }
        let key = (record.rater_id.clone(), record.account_ref.clone(), record.round);
        let revision = {
            let r = self.revisions.entry(key.clone()).or_insert(0);
            *r += 1;
            *r
        };
        self.last_seq = record.seq;
        let ack = Acknowledgment {
            seq: record.seq,
            account_ref: record.account_ref.clone(),
            round: record.round,
            revision,
        };
        self.latest.insert(key, record);
        Ok(ack)
    }

    pub fn history_len(&self, rater_id: &str, reference: &str, round: u8) -> usize {
        self.revisions
            .get(&(rater_id.to_string(), reference.to_string(), round))
            .copied()
            .unwrap_or(0)
    }

    pub fn current(&self, rater_id: &str, reference: &str, round: u8) -> Option<&RatingRecord> {
        self.latest.get(&(rater_id.to_string(), reference.to_string(), round))
    }

    pub fn state(&self) -> RatingState {
        RatingState {
            last_seq: self.last_seq,
            latest: self.latest.values().cloned().collect(),
            revisions: self.revisions.values().copied().collect(),
        }
    }

    /// Replaces the derived state with a snapshot.
    pub fn restore(&mut self, state: RatingState) -> Result<(), RatingError> {
        if state.latest.len() != state.revisions.len() {
            return Err(RatingError::Log("snapshot is inconsistent".into()));
        }
        self.latest.clear();
        self.revisions.clear();
        for (record, revisions) in state.latest.into_iter().zip(state.revisions) {
            if !self.accounts.contains_key(&record.account_ref) {
                return Err(RatingError::Log(format!("snapshot references unknown account {}", record.account_ref)));
            }
            let key = (record.rater_id.clone(), record.account_ref.clone(), record.round);
            self.revisions.insert(key.clone(), revisions);
            self.latest.insert(key, record);
        }
        self.last_seq = state.last_seq;
        Ok(())
    }

    pub fn agreement(&self) -> AgreementReport {
        let mut report = AgreementReport {
            pairs: Vec::new(),
            accounts: self.accounts.len(),
            pending: 0,
            agreed_bot: 0,
            agreed_human: 0,
            agreed_unknown: 0,
            disagreements: 0,
            agreed_but_difficult: 0,
            round2_queue: Vec::new(),
            resolved: 0,
            ground_truth: 0,
        };
        for (reference, entry) in &self.accounts {
            let status = self.status(reference).expect("known reference");
            if let AccountStatus::Pending { .. } = status {
                report.pending += 1;
                continue;
            }
            let verdicts = self.round1_verdicts(reference, entry);
            let first = verdicts[0].verdict;
            if verdicts.iter().all(|r| r.verdict == first) {
                match first {
                    Verdict::Bot => report.agreed_bot += 1,
                    Verdict::Human => report.agreed_human += 1,
                    _ => report.agreed_unknown += 1,
                }
                if first != Verdict::Unknown && verdicts.iter().any(|r| r.difficulty.is_hard()) {
                    report.agreed_but_difficult += 1;
                }
            } else {
                report.disagreements += 1;
            }
            match status {
                AccountStatus::Round2 { reasons } => report.round2_queue.push(QueueEntry {
                    account_ref: reference.clone(),
                    reasons,
                }),
                AccountStatus::Resolved { label } => {
                    report.resolved += 1;
                    if label != Verdict::Mixed {
                        report.ground_truth += 1;
                    }
                }
                AccountStatus::Agreed { .. } => report.ground_truth += 1,
                AccountStatus::Pending { .. } => unreachable!(),
            }
        }

        let mut raters: Vec<&str> = self
            .latest
            .keys()
            .filter(|(_, _, round)| *round == 1)
            .map(|(r, _, _)| r.as_str())
            .collect();
        raters.sort_unstable();
        raters.dedup();
        for (i, a) in raters.iter().enumerate() {
            for b in &raters[i + 1..] {
                let (mut va, mut vb) = (Vec::new(), Vec::new());
                for reference in self.accounts.keys() {
                    if let (Some(ra), Some(rb)) = (self.current(a, reference, 1), self.current(b, reference, 1)) {
                        va.push(ra.verdict);
                        vb.push(rb.verdict);
                    }
                }
                if va.is_empty() {
                    continue;
                }
                let k = cohens_kappa::<f64, Verdict>(&va, &vb).expect("paired, non-empty ratings");
                report.pairs.push(PairAgreement {
                    rater_a: a.to_string(),
                    rater_b: b.to_string(),
                    items: va.len(),
                    kappa: k.kappa,
                    observed_agreement: k.observed_agreement,
                    expected_agreement: k.expected_agreement,
                });
            }
        }
        report
    }

    /// Finalized labels, one row per (account, repository). Mixed and
    /// unresolved accounts go to `excluded`; accounts still in round 1 are
    /// left out entirely.
    pub fn export(&self) -> GroundTruthExport {
        let mut rows = Vec::new();
        let mut excluded = Vec::new();
        for (reference, entry) in &self.accounts {
            let repos = || entry.repositories.iter().cloned().collect::<Vec<_>>().join(";");
            match self.status(reference).expect("known reference") {
                AccountStatus::Agreed { label } | AccountStatus::Resolved { label } if label != Verdict::Mixed => {
                    for repository in &entry.repositories {
                        rows.push(GroundTruthRow {
                            repository: repository.clone(),
                            account: entry.account.clone(),
                            label,
                        });
                    }
                }
                AccountStatus::Resolved { .. } => excluded.push(ExcludedAccount {
                    account: entry.account.clone(),
                    status: "mixed".into(),
                    repositories: repos(),
                }),
                AccountStatus::Round2 { .. } => excluded.push(ExcludedAccount {
                    account: entry.account.clone(),
                    status: "unresolved".into(),
                    repositories: repos(),
                }),
                AccountStatus::Agreed { .. } | AccountStatus::Pending { .. } => {}
            }
        }
        rows.sort();
        excluded.sort();
        GroundTruthExport { rows, excluded }
    }
}

fn parse_cursor(cursor: &str) -> Result<(String, usize), RatingError> {
    let invalid = || RatingError::Validation(format!("malformed cursor {cursor:?}"));
    let (reference, offset) = cursor.rsplit_once(':').ok_or_else(invalid)?;
    let offset = offset.parse().map_err(|_| invalid())?;
    Ok((reference.to_string(), offset))
}
