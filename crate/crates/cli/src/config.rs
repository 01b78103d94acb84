//! Optional JSON configuration file. Command-line flags override it, and it
//! overrides the built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub degree: Option<u32>,
    pub exact: Option<bool>,
    pub init: Option<PathBuf>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub steps: Option<usize>,
    pub samples: Option<usize>,
    pub h: Option<f64>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub rho_max: Option<f64>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub points: Option<usize>,
    pub end: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| format!("malformed config: {e}"))?;
        if cfg.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(format!(
                "config schema_version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                cfg.schema_version
            ));
        }
        Ok(cfg)
    }
}

/// Flag, then config, then default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Flag, then config; a usage error names the missing option.
pub fn require<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T, String> {
    flag.or(config).ok_or_else(|| format!("missing required option --{name}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None, None, 3), 3);
        assert!(require::<u32>(None, None, "degree").unwrap_err().contains("--degree"));
    }

    #[test]
    fn schema_is_checked() {
        assert_eq!(ConfigFile::parse(r#"{"schema_version":1,"degree":3}"#).unwrap().degree, Some(3));
        assert!(ConfigFile::parse(r#"{"schema_version":2}"#).is_err());
        assert!(ConfigFile::parse(r#"{"schema_version":1,"bogus":0}"#).is_err());
        assert!(ConfigFile::parse("not json").is_err());
    }
}
