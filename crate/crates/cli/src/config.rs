//! `certikit run`: key-value experiment files.
//!
//! One `key = value` per line; blank lines and lines starting with `#` are skipped. The
//! `command` key names a subcommand and every other key is that subcommand's flag with
//! underscores or dashes (`chunk_size` and `chunk-size` are the same key). A value of
//! `true` turns on a switch such as `reduce`; `false` leaves it off. Unknown keys are
//! rejected by the same parser the direct subcommands use.
//!
//! ```text
//! command = star
//! class = singletons:n=3
//! b = 1
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use certikit::{CertError, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub struct ExperimentConfig {
    pub command: String,
    /// Flag name (kebab case) to raw value, in file order.
    pub entries: Vec<(String, String)>,
    pub sha256: String,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut command = None;
        let mut entries: Vec<(String, String)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CertError::Input(format!("config line {}: expected `key = value`", n + 1)))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(CertError::Input(format!("config line {}: empty key", n + 1)));
            }
            if key == "command" {
                if command.replace(value).is_some() {
                    return Err(CertError::Input("config sets `command` twice".into()));
                }
                continue;
            }
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(CertError::Input(format!("config sets `{key}` twice")));
            }
            entries.push((key, value));
        }
        let command = command.ok_or_else(|| CertError::Input("config needs a `command` key".into()))?;
        if command == "run" {
            return Err(CertError::Input("a config cannot run another config".into()));
        }
        let sha256 = format!("{:x}", Sha256::digest(text.as_bytes()));
        Ok(ExperimentConfig {
            command,
            entries,
            sha256,
        })
    }

    pub fn seed(&self) -> Option<u64> {
        self.entries
            .iter()
            .find(|(k, _)| k == "seed")
            .and_then(|(_, v)| v.parse().ok())
    }

    /// Command line equivalent to this config.
    pub fn argv(&self) -> Vec<String> {
        let mut argv = vec!["certikit".to_string(), self.command.clone()];
        for (key, value) in &self.entries {
            match value.as_str() {
                "true" => argv.push(format!("--{key}")),
                "false" => {}
                _ => {
                    argv.push(format!("--{key}"));
                    argv.push(value.clone());
                }
            }
        }
        argv
    }
}

#[derive(Serialize)]
pub struct Manifest {
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub config: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub timestamp_unix: u64,
    pub exit_code: u8,
    pub artifacts: Vec<String>,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig) -> Manifest {
        Manifest {
            version: env!("CARGO_PKG_VERSION"),
            command: config.command.clone(),
            config_sha256: config.sha256.clone(),
            config: config.entries.iter().cloned().collect(),
            seed: config.seed(),
            threads: rayon::current_num_threads(),
            wall_time_seconds: 0.0,
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            exit_code: 0,
            artifacts: Vec::new(),
        }
    }
}
