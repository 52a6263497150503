//! Run manifests. The hash covers everything except the timestamps, so
//! repeating an invocation reproduces it.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

pub struct Manifest {
    body: Value,
    started: f64,
    hash: String,
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

impl Manifest {
    /// `config` echoes the effective settings; `outputs` are file names
    /// relative to the output directory.
    pub fn new(
        command: &str,
        config: Value,
        seeds: &[u64],
        inputs: &[String],
        outputs: &[String],
    ) -> Self {
        let body = json!({
            "tool": "cdseq",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
            "seeds": seeds,
            "inputs": inputs,
            "outputs": outputs,
        });
        // serde_json objects keep sorted keys, so this text is canonical
        let canonical = serde_json::to_string(&body).expect("manifest serializes");
        let hash = format!("{:x}", Sha256::digest(canonical.as_bytes()));
        Self {
            body,
            started: unix_now(),
            hash,
        }
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let mut value = self.body.clone();
        value["sha256"] = json!(self.hash);
        value["started_unix"] = json!(self.started);
        value["finished_unix"] = json!(unix_now());
        write_json(&dir.join(MANIFEST_FILE), &value)
    }
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::output(path, e))
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))
}
