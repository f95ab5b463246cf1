//! Versioned output documents. Every report embeds the resolved config, its
//! fingerprint, and the seed, so a run can be reproduced exactly from its own
//! output (the timestamp is the only non-deterministic field).

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use zinfer::dpgmm::fingerprint_text;
use zinfer::{Error, Result};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub schema: u32,
    pub command: String,
    pub seed: u64,
    pub fingerprint: String,
    pub timestamp: u64,
    pub config: RunConfig,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, config: &RunConfig, result: T) -> Result<Self> {
        let config_json = serde_json::to_string(config)?;
        let fingerprint =
            fingerprint_text(&format!("{command}:{}:{config_json}", config.seed()));
        Ok(Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            seed: config.seed(),
            fingerprint,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config: config.clone(),
            result,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// Comment header stamped onto CSV outputs.
pub fn csv_header(command: &str, config: &RunConfig) -> Result<String> {
    let config_json = serde_json::to_string(config)?;
    let fingerprint = fingerprint_text(&format!("{command}:{}:{config_json}", config.seed()));
    Ok(format!(
        "# fingerprint={fingerprint}\n# seed={}\n",
        config.seed()
    ))
}

pub fn ensure_out_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| Error::input(format!("cannot create output dir {}: {e}", path.display())))
}
