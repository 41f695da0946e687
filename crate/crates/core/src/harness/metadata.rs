//! Run metadata: the full config, the crate version and git revision, and a
//! SHA-256 digest of the serialised config. Replaying a record re-runs the
//! experiment after checking the digest.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const METADATA_FILE: &str = "metadata.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataRecord {
    pub artifact_version: String,
    pub git_revision: String,
    pub seed: u64,
    pub config_digest: String,
    pub config: ExperimentConfig,
}

pub fn artifact_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

pub fn git_revision() -> String {
    env!("INCRELAB_GIT_REV").to_string()
}

/// Hex SHA-256 of the compact JSON serialisation of `cfg`.
pub fn config_digest(cfg: &ExperimentConfig) -> Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl MetadataRecord {
    pub fn for_config(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Self {
            artifact_version: artifact_version(),
            git_revision: git_revision(),
            seed: cfg.seed,
            config_digest: config_digest(cfg)?,
            config: cfg.clone(),
        })
    }

    /// Fails if the stored digest does not match the stored config.
    pub fn verify(&self) -> Result<()> {
        let actual = config_digest(&self.config)?;
        if actual != self.config_digest {
            return Err(Error::Integrity(format!(
                "config digest {actual} does not match recorded {}",
                self.config_digest
            )));
        }
        if self.seed != self.config.seed {
            return Err(Error::Integrity(format!(
                "recorded seed {} differs from config seed {}",
                self.seed, self.config.seed
            )));
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Writes `metadata.json` into the config's output directory.
pub fn emit_metadata(cfg: &ExperimentConfig) -> Result<MetadataRecord> {
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let record = MetadataRecord::for_config(cfg)?;
    record.write(&dir.join(METADATA_FILE))?;
    Ok(record)
}
