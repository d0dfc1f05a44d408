use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::RatingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Rater,
    Adjudicator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaterEntry {
    pub id: String,
    pub token: String,
    #[serde(default = "default_roles")]
    pub roles: BTreeSet<Role>,
}

fn default_roles() -> BTreeSet<Role> {
    BTreeSet::from([Role::Rater])
}

/// Rater roster and service options, read from a JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    /// Mixed into account references so they cannot be reversed by hashing
    /// known account names.
    pub salt: String,
    #[serde(default = "default_raters_per_account")]
    pub raters_per_account: usize,
    /// Whether adjudicators see comment timestamps in round 2.
    #[serde(default = "default_true")]
    pub round2_timestamps: bool,
    /// Rewrite the snapshot after this many new log records.
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    pub raters: Vec<RaterEntry>,
}

fn default_raters_per_account() -> usize {
    2
}

fn default_true() -> bool {
    true
}

fn default_snapshot_every() -> usize {
    50
}

impl ServiceConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, RatingError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| RatingError::Io(format!("{}: {e}", path.display())))?;
        let config: ServiceConfig =
            serde_json::from_str(&text).map_err(|e| RatingError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), RatingError> {
        if self.salt.is_empty() {
            return Err(RatingError::Config("salt must not be empty".into()));
        }
        let mut ids = HashSet::new();
        let mut tokens = HashSet::new();
        for r in &self.raters {
            if r.id.is_empty() || r.token.trim().is_empty() {
                return Err(RatingError::Config("rater ids and tokens must not be empty".into()));
            }
            if !ids.insert(&r.id) {
                return Err(RatingError::Config(format!("duplicate rater id {:?}", r.id)));
            }
            if !tokens.insert(&r.token) {
                return Err(RatingError::Config(format!("rater {:?} reuses another rater's token", r.id)));
            }
        }
        let raters = self.raters.iter().filter(|r| r.roles.contains(&Role::Rater)).count();
        if self.raters_per_account < 2 {
            return Err(RatingError::Config("raters_per_account must be at least 2".into()));
        }
        if raters < self.raters_per_account {
            return Err(RatingError::Config(format!(
                "{raters} raters configured, {} needed per account",
                self.raters_per_account
            )));
        }
        Ok(())
    }

    pub fn rater_by_token(&self, token: &str) -> Option<&RaterEntry> {
        self.raters.iter().find(|r| r.token == token)
    }
}
