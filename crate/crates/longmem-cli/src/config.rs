//! Flat key=value config files ('#' comments) and flag/config resolution.
//!
//! Flags override config-file values; every command echoes the fully
//! resolved configuration into its output header so a run can be
//! reconstructed from the artifact alone.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Parsed config file: bare `key=value` lines, blank lines and `#` comments
/// ignored, later duplicates win.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::input(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::input(format!(
                        "config {}:{}: expected key=value, got `{line}`",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                entries.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// The effective configuration of a run, accumulated while options are
/// resolved and echoed into every output header.
#[derive(Debug, Default, Clone)]
pub struct ResolvedConfig {
    entries: BTreeMap<String, String>,
}

impl ResolvedConfig {
    pub fn put(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// `# key=value` header lines for CSV-style outputs.
    pub fn csv_header(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.entries
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect(),
        )
    }
}

/// Flag value if present, else config-file value (parsed), else default.
pub fn resolve<T>(
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
    default: T,
) -> Result<T, CliError>
where
    T: std::str::FromStr + Clone,
    <T as std::str::FromStr>::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => match config.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|e| CliError::input(format!("config key {key}: {e}"))),
            None => Ok(default),
        },
    }
}

/// Same as [`resolve`] but without a default.
pub fn resolve_opt<T>(
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T: std::str::FromStr + Clone,
    <T as std::str::FromStr>::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => match config.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::input(format!("config key {key}: {e}"))),
            None => Ok(None),
        },
    }
}

/// Boolean switch: a bare flag can only turn the option on; the config file
/// may set true/false.
pub fn resolve_switch(
    flag: bool,
    config: &ConfigFile,
    key: &str,
    default: bool,
) -> Result<bool, CliError> {
    if flag {
        return Ok(true);
    }
    match config.get(key) {
        Some(raw) => raw
            .parse::<bool>()
            .map_err(|e| CliError::input(format!("config key {key}: {e}"))),
        None => Ok(default),
    }
}
