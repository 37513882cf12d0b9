//! `key = value` configuration file.
//!
//! Lookup order for the file: `--config`, then `$GMFORMS_CONFIG`, then
//! `$HOME/.config/gmforms/gmforms.conf`. Only an explicitly named file has
//! to exist. Command-line flags override anything read here.

use std::path::{Path, PathBuf};

pub const ENV_VAR: &str = "GMFORMS_CONFIG";
pub const DEFAULT_P_CAP: u64 = 1200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub p_cap: u64,
    pub workers: Option<usize>,
    pub source: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            p_cap: DEFAULT_P_CAP,
            workers: None,
            source: None,
        }
    }
}

impl Config {
    pub fn load(flag: Option<&Path>) -> Result<Config, String> {
        let (path, required) = match (flag, std::env::var_os(ENV_VAR)) {
            (Some(p), _) => (Some(p.to_path_buf()), true),
            (None, Some(p)) => (Some(PathBuf::from(p)), true),
            (None, None) => (default_path(), false),
        };
        let Some(path) = path else {
            return Ok(Config::default());
        };
        match std::fs::read_to_string(&path) {
            Ok(text) => {
                let mut cfg =
                    Config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                cfg.source = Some(path);
                Ok(cfg)
            }
            Err(e) if !required && e.kind() == std::io::ErrorKind::NotFound => {
                Ok(Config::default())
            }
            Err(e) => Err(format!("cannot read config {}: {e}", path.display())),
        }
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |_| format!("line {}: bad value {value:?} for {key}", i + 1);
            match key {
                "p_cap" => cfg.p_cap = value.parse().map_err(bad)?,
                "workers" => cfg.workers = Some(value.parse().map_err(bad)?),
                _ => return Err(format!("line {}: unknown key {key:?}", i + 1)),
            }
        }
        Ok(cfg)
    }
}

fn default_path() -> Option<PathBuf> {
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".config/gmforms/gmforms.conf"))
}
