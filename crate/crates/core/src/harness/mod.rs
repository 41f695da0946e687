//! Experiment orchestration: the incremental and distill-bias protocols,
//! metrics output, and metadata records that make every run replayable.
//!
//! A run writes into its output directory:
//!
//! * `metadata.json`, written before training starts,
//! * `accuracy.csv`, one row per increment and one column per classifier,
//! * `confusion_<kind>.csv`, final confusion matrices (rows = true class),
//! * `scale.csv`, the final scale vector,
//! * `summary.json`, the full report including wall time.
//!
//! Everything except `summary.json` is byte-identical when the run is replayed.

mod config;
mod metadata;
mod metrics;
mod protocols;

use std::path::{Path, PathBuf};

pub use config::{
    random_classes, ClassifierKind, DatasetSpec, ExperimentConfig, Protocol, DEFAULT_BUDGET, DEFAULT_GAMMA,
    DEFAULT_TEMPERATURE,
};
pub use metadata::{artifact_version, config_digest, emit_metadata, git_revision, MetadataRecord, METADATA_FILE};
pub use metrics::{AuditPoint, ConfusionMatrix, IncrementMetrics, MemoryAudit, MetricsReport};
pub use protocols::{execute_distill_bias, execute_incremental, load_splits, DistillBiasRun, IncrementalRun, Splits};

use crate::error::{Error, Result};

fn prepare(cfg: &ExperimentConfig) -> Result<Splits> {
    cfg.validate()?;
    emit_metadata(cfg)?;
    load_splits(&cfg.dataset, cfg.seed)
}

/// Validates, records metadata, runs the incremental protocol and writes the metric files.
pub fn run_incremental(cfg: &ExperimentConfig) -> Result<MetricsReport> {
    if !matches!(cfg.protocol, Protocol::Incremental { .. }) {
        return Err(Error::Validation("expected the incremental protocol".into()));
    }
    let splits = prepare(cfg)?;
    let run = execute_incremental(cfg, &splits)?;
    run.report.write(&cfg.out_dir)?;
    Ok(run.report)
}

/// Validates, records metadata, runs the distill-bias protocol and writes the metric files.
pub fn run_distill_bias(cfg: &ExperimentConfig) -> Result<MetricsReport> {
    if !matches!(cfg.protocol, Protocol::DistillBias { .. }) {
        return Err(Error::Validation("expected the distill-bias protocol".into()));
    }
    let splits = prepare(cfg)?;
    let run = execute_distill_bias(cfg, &splits)?;
    run.report.write(&cfg.out_dir)?;
    Ok(run.report)
}

pub fn run(cfg: &ExperimentConfig) -> Result<MetricsReport> {
    match cfg.protocol {
        Protocol::Incremental { .. } => run_incremental(cfg),
        Protocol::DistillBias { .. } => run_distill_bias(cfg),
    }
}

/// Settings that may differ on the replaying machine. They are applied after
/// the digest check.
#[derive(Debug, Clone, Default)]
pub struct ReplayOptions {
    /// Defaults to `<dir of metadata>/replay`.
    pub out_dir: Option<PathBuf>,
    pub mnist_dir: Option<PathBuf>,
}

/// Re-runs the experiment recorded in a metadata file.
pub fn replay(metadata_path: impl AsRef<Path>, opts: &ReplayOptions) -> Result<MetricsReport> {
    let path = metadata_path.as_ref();
    let record = MetadataRecord::read(path)?;
    record.verify()?;
    if record.artifact_version != artifact_version() || record.git_revision != git_revision() {
        log::warn!(
            "metadata was written by {} ({}), replaying with {} ({})",
            record.artifact_version,
            record.git_revision,
            artifact_version(),
            git_revision()
        );
    }
    let mut cfg = record.config;
    cfg.out_dir = match &opts.out_dir {
        Some(d) => d.clone(),
        None => path.parent().unwrap_or(Path::new(".")).join("replay"),
    };
    if let (Some(new_dir), DatasetSpec::Mnist { dir, .. }) = (&opts.mnist_dir, &mut cfg.dataset) {
        *dir = new_dir.clone();
    }
    run(&cfg)
}
