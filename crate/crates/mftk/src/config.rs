//! Run-configuration files: `key=value` lines, `#` comments, blank lines
//! ignored. Keys are the long option names of the subcommand being run
//! (e.g. `method=mfd2`, `seed=7`); values are taken verbatim. Options
//! given on the command line win over the file on conflict.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config line {line}: expected key=value, found {content:?}")]
    BadLine { line: usize, content: String },
    #[error("config line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(source: &str) -> Result<ConfigFile, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::BadLine {
                line: idx + 1,
                content: raw.to_string(),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::BadLine {
                    line: idx + 1,
                    content: raw.to_string(),
                });
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(ConfigError::DuplicateKey { line: idx + 1, key });
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<ConfigFile, ConfigError> {
        ConfigFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Command-line value wins; the config file fills gaps.
    pub fn resolve<'a>(&'a self, key: &str, flag: Option<&'a str>) -> Option<&'a str> {
        flag.or_else(|| self.get(key))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}
