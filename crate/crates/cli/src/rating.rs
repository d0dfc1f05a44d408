//! Launching the rating service and exporting its ground truth offline.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use botgate_core::corpus::{group_and_filter, CorpusFilter};
use botgate_rating::http::{router, serve, AppState};
use botgate_rating::{GroundTruthExport, RatingService, RatingStore, ServiceConfig};

use crate::error::CliError;
use crate::input::CommentSource;

#[derive(Debug, Clone)]
pub struct RatingSetup {
    pub config: PathBuf,
    pub corpus: PathBuf,
    pub log: PathBuf,
    pub filter: CorpusFilter,
}

impl RatingSetup {
    /// Rebuilds the service from its configuration, corpus and log.
    pub fn open(&self) -> Result<RatingStore, CliError> {
        let config = ServiceConfig::load(&self.config)?;
        let comments = CommentSource::Corpus(self.corpus.clone()).load()?;
        let accounts = group_and_filter(&comments, &self.filter);
        let service = RatingService::new(config, &accounts)?;
        Ok(RatingStore::open(service, &self.log)?)
    }
}

/// Serves until the process is stopped. The bound address is written to
/// `announce` first, which matters when `port` is 0.
pub fn serve_rating(
    setup: &RatingSetup,
    bind: &str,
    port: u16,
    ui_dir: Option<PathBuf>,
    announce: &mut dyn Write,
) -> Result<(), CliError> {
    let store = setup.open()?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((bind, port)).await?;
        writeln!(announce, "listening on http://{}", listener.local_addr()?)?;
        announce.flush()?;
        serve(listener, router(AppState::new(store), ui_dir)).await?;
        Ok(())
    })
}

/// Sidecar path used when none is given: `labels.csv` → `labels.excluded.csv`.
pub fn default_sidecar(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.excluded.csv"))
}

pub fn write_export(export: &GroundTruthExport, out: &Path, sidecar: &Path) -> Result<(), CliError> {
    fs::write(out, export.rows_csv()?)?;
    fs::write(sidecar, export.excluded_csv()?)?;
    Ok(())
}
