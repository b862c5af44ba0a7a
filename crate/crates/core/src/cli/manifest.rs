use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::rng::SeedSpec;

/// Provenance sidecar written next to every output CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the canonical JSON of `config`.
    pub config_digest: String,
    pub seed: Option<SeedSpec>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub output_paths: Vec<String>,
    /// The fully resolved settings.
    pub config: serde_json::Value,
}

/// Digest of a resolved config. `serde_json` maps keep keys sorted, so the
/// serialization (and the digest) ignores the order keys were written in.
pub fn config_digest(config: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(config).expect("json values serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: &serde_json::Value,
        seed: Option<SeedSpec>,
        started: DateTime<Utc>,
        output_paths: Vec<String>,
    ) -> Self {
        let stamp = |t: DateTime<Utc>| t.to_rfc3339_opts(SecondsFormat::Millis, true);
        Self {
            command: command.to_string(),
            config_digest: config_digest(config),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: stamp(started),
            finished: stamp(Utc::now()),
            output_paths,
            config: config.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests serialize") + "\n"
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
