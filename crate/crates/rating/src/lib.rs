//! Backend for manually labelling accounts as bots or humans.
//!
//! Raters see anonymized comment batches and submit a verdict plus a
//! difficulty. Every account is rated by at least two raters; disagreements,
//! shared "unknown" verdicts and anything marked difficult go to a second
//! round decided by an adjudicator. Submissions are kept in an append-only
//! log ([`store`]) from which the whole state can be rebuilt, and the
//! finalized labels export as a ground-truth CSV.
//!
//! [`http`] exposes the JSON API used by the browser frontend.

pub mod anonymize;
pub mod config;
pub mod http;
pub mod service;
pub mod store;

pub use config::{RaterEntry, Role, ServiceConfig};
pub use service::{
    AccountStatus, Acknowledgment, AgreementReport, Difficulty, GroundTruthExport, NextBatch, RatingRecord,
    RatingService, SubmitRequest, Verdict, BATCH_SIZE,
};
pub use store::RatingStore;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatingError {
    #[error("missing or unknown rater token")]
    Unauthorized,
    #[error("forbidden: {0}")]
    Forbidden(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid request: {0}")]
    Validation(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("ratings log error: {0}")]
    Log(String),
}

impl RatingError {
    /// HTTP status for the error.
    pub fn status(&self) -> u16 {
        match self {
            RatingError::Unauthorized => 401,
            RatingError::Forbidden(_) => 403,
            RatingError::NotFound(_) => 404,
            RatingError::Validation(_) => 422,
            RatingError::Config(_) | RatingError::Io(_) | RatingError::Log(_) => 500,
        }
    }

    /// Stable machine-readable code, the `code` field of error responses.
    pub fn code(&self) -> &'static str {
        match self {
            RatingError::Unauthorized => "unauthorized",
            RatingError::Forbidden(_) => "forbidden",
            RatingError::NotFound(_) => "not_found",
            RatingError::Validation(_) => "validation_error",
            RatingError::Config(_) => "config_error",
            RatingError::Io(_) => "io_error",
            RatingError::Log(_) => "log_error",
        }
    }
}

impl From<std::io::Error> for RatingError {
    fn from(e: std::io::Error) -> Self {
        RatingError::Io(e.to_string())
    }
}
