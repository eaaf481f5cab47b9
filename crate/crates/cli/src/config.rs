//! Flat key-value run configs: `key = value` lines, `#` comments.
//! Command-line flags override file entries.

use std::collections::HashMap;
use std::path::Path;

pub struct Config {
    entries: HashMap<String, String>,
}

impl Config {
    pub fn empty() -> Config {
        Config {
            entries: HashMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(format!("line {}: empty key", lineno + 1));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { entries })
    }

    /// CLI value if given, else the config entry parsed as T.
    pub fn pick<T: std::str::FromStr>(
        &self,
        cli: Option<T>,
        key: &str,
    ) -> Result<Option<T>, String> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(text) => text
                .parse()
                .map(Some)
                .map_err(|_| format!("config key '{key}': cannot parse '{text}'")),
        }
    }
}
