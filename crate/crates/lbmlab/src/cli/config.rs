//! Key=value config files and their merge with command-line flags.
//!
//! Grammar: one `key = value` per line, `#` starts a comment, blank lines
//! ignored. Keys not in the accepted set for the subcommand are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config {path} line {line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("missing required setting `{0}`")]
    Missing(String),
    #[error("setting `{key}`: cannot parse `{value}` as {want}")]
    BadValue { key: String, value: String, want: &'static str },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Resolved settings of one run: config-file values overridden by flags.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                path: path.display().to_string(),
                line: i + 1,
                message: format!("expected key=value, got `{line}`"),
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(RunConfig { values })
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    pub fn set_f64(&mut self, key: &str, value: Option<f64>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), format!("{v}"));
        }
    }

    pub fn set_usize(&mut self, key: &str, value: Option<usize>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), format!("{v}"));
        }
    }

    pub fn set_str(&mut self, key: &str, value: Option<&str>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.to_string());
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                    want: "a float",
                })
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                    want: "an unsigned integer",
                })
            })
            .transpose()
            .map(|v| v.unwrap_or(default))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                    want: "an unsigned integer",
                })
            })
            .transpose()
            .map(|v| v.unwrap_or(default))
    }

    /// Reject keys outside the accepted set (close the door on typos).
    pub fn validate_keys(&self, accepted: &[&str]) -> Result<(), ConfigError> {
        for key in self.values.keys() {
            if !accepted.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey(key.clone()));
            }
        }
        Ok(())
    }

    /// Sorted key=value lines for the manifest.
    pub fn manifest_lines(&self) -> Vec<String> {
        self.values.iter().map(|(k, v)| format!("{k}={v}")).collect()
    }
}
