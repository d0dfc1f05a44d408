//! Durable state: an append-only JSON Lines log of [`RatingRecord`]s plus a
//! snapshot of the derived state, rewritten every `snapshot_every` records.
//!
//! A record is on disk (flushed and synced) before it is applied, so a
//! failed write leaves the in-memory state untouched. On open the snapshot is
//! restored and log records newer than it are replayed; the log alone always
//! suffices to rebuild the state.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use crate::service::{Acknowledgment, RatingRecord, RatingService, RatingState, SubmitRequest};
use crate::RatingError;

pub struct RatingStore {
    service: RatingService,
    log_path: PathBuf,
    log: File,
    since_snapshot: usize,
}

/// `<log>.snapshot.json` next to the log.
pub fn snapshot_path(log_path: &Path) -> PathBuf {
    let mut name = log_path.file_name().unwrap_or_default().to_os_string();
    name.push(".snapshot.json");
    log_path.with_file_name(name)
}

impl RatingStore {
    /// Opens (or creates) the log at `log_path` and brings `service` up to
    /// date with it.
    pub fn open(mut service: RatingService, log_path: impl Into<PathBuf>) -> Result<Self, RatingError> {
        let log_path = log_path.into();
        let snapshot = snapshot_path(&log_path);
        if snapshot.exists() {
            let text = fs::read_to_string(&snapshot)?;
            let state: RatingState = serde_json::from_str(&text)
                .map_err(|e| RatingError::Log(format!("{}: {e}", snapshot.display())))?;
            service.restore(state)?;
        }
        let mut since_snapshot = 0;
        if log_path.exists() {
            truncate_partial_tail(&log_path)?;
            let reader = BufReader::new(File::open(&log_path)?);
            for (n, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: RatingRecord = serde_json::from_str(&line)
                    .map_err(|e| RatingError::Log(format!("{} line {}: {e}", log_path.display(), n + 1)))?;
                if record.seq > service.last_seq() {
                    service.apply(record)?;
                    since_snapshot += 1;
                }
            }
        }
        let log = OpenOptions::new().create(true).append(true).open(&log_path)?;
        Ok(Self {
            service,
            log_path,
            log,
            since_snapshot,
        })
    }

    pub fn service(&self) -> &RatingService {
        &self.service
    }

    pub fn log_path(&self) -> &Path {
        &self.log_path
    }

    /// Validates, persists and applies one submission.
    pub fn submit(
        &mut self,
        rater_id: &str,
        request: &SubmitRequest,
        now: DateTime<Utc>,
    ) -> Result<Acknowledgment, RatingError> {
        let record = self.service.prepare(rater_id, request, now)?;
        let mut line = serde_json::to_string(&record).map_err(|e| RatingError::Log(e.to_string()))?;
        line.push('\n');
        self.log.write_all(line.as_bytes())?;
        self.log.sync_data()?;
        let ack = self.service.apply(record)?;
        self.since_snapshot += 1;
        if self.since_snapshot >= self.service.config().snapshot_every.max(1) {
            self.write_snapshot()?;
        }
        Ok(ack)
    }

    /// Writes the snapshot atomically (temporary file, then rename).
    pub fn write_snapshot(&mut self) -> Result<(), RatingError> {
        let path = snapshot_path(&self.log_path);
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string(&self.service.state()).map_err(|e| RatingError::Log(e.to_string()))?;
        {
            let mut f = File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        self.since_snapshot = 0;
        Ok(())
    }
}

/// A crash mid-append can leave a last line without its newline; that
/// record was never acknowledged, so it is dropped.
fn truncate_partial_tail(path: &Path) -> Result<(), RatingError> {
    let bytes = fs::read(path)?;
    if bytes.last().is_some_and(|&b| b != b'\n') {
        let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
    }
    Ok(())
}
