//! Flat `key = value` sweep configuration files.
//!
//! No nesting, no quoting; exactly the documented keys. Lines starting with
//! `#` and blank lines are ignored. Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::Path;

use interproj::error::{Error, Result};

/// Raw parsed keys; validation and typing happen when merged with the flags.
#[derive(Debug, Default)]
pub struct FileConfig {
    pub values: BTreeMap<String, String>,
}

const KNOWN_KEYS: [&str; 11] = [
    "class",
    "dimension",
    "constraints",
    "instances",
    "iterations",
    "betas",
    "algorithms",
    "seed",
    "parallelism",
    "oracle_budget",
    "out",
];

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "config line {}: expected 'key = value'",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Parse(format!(
                    "config line {}: unknown key '{key}'",
                    lineno + 1
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let cfg = FileConfig::parse("class = lin\n# comment\ninstances = 5\n").unwrap();
        assert_eq!(cfg.get("class"), Some("lin"));
        assert_eq!(cfg.get("instances"), Some("5"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(FileConfig::parse("colour = blue\n").is_err());
        assert!(FileConfig::parse("no equals sign\n").is_err());
    }
}
