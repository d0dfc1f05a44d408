#![allow(dead_code)]

use std::collections::BTreeSet;

use chrono::{DateTime, Duration, TimeZone, Utc};

use botgate_core::corpus::{AccountActivity, RawComment, ThreadKind};
use botgate_rating::{RaterEntry, Role, ServiceConfig};

pub fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2023, 5, 1, 12, 0, 0).unwrap()
}

/// `n` comments by `account` in `repository`; comment `i` is `i` minutes
/// after `t0` and its body names its index and the account.
pub fn activity(account: &str, repository: &str, n: usize) -> AccountActivity {
    let comments = (0..n)
        .map(|i| RawComment {
            id: format!("{account}-{i:03}"),
            repository: repository.to_string(),
            thread_kind: ThreadKind::Issue,
            is_description: false,
            author: account.to_string(),
            created_at: t0() + Duration::minutes(i as i64),
            body: format!("comment {i}: ping @{account} about {repository}"),
        })
        .collect();
    AccountActivity::new(account, comments).unwrap()
}

pub fn rater(id: &str, roles: &[Role]) -> RaterEntry {
    RaterEntry {
        id: id.to_string(),
        token: format!("token-{id}"),
        roles: roles.iter().copied().collect::<BTreeSet<_>>(),
    }
}

/// alice and bob rate; carol only adjudicates.
pub fn config() -> ServiceConfig {
    ServiceConfig {
        salt: "test-salt".into(),
        raters_per_account: 2,
        round2_timestamps: true,
        snapshot_every: 4,
        raters: vec![
            rater("alice", &[Role::Rater]),
            rater("bob", &[Role::Rater]),
            rater("carol", &[Role::Adjudicator]),
        ],
    }
}

pub fn accounts(n: usize) -> Vec<AccountActivity> {
    (0..n)
        .map(|i| activity(&format!("account{i:02}"), &format!("acme/repo{}", i % 3), 12 + i))
        .collect()
}
