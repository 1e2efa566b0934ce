//! The TOML settings file read by the command-line tool.
//!
//! Top-level keys are [`ResolutionConfig`] fields; an optional `[detector]`
//! table holds [`DetectorConfig`] fields. Missing keys keep their defaults.
//!
//! ```toml
//! confidence_threshold = 0.5
//! max_findings = 3
//!
//! [detector]
//! score_threshold = 0.9
//! scales = [0.5, 1.0, 2.0]
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::icons::DetectorConfig;
use crate::resolution::ResolutionConfig;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub resolution: ResolutionConfig,
    pub detector: DetectorConfig,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config = |e: toml::de::Error| Error::Config(e.to_string().trim().to_string());
        let mut table: toml::Table = toml::from_str(text).map_err(config)?;
        let detector = match table.remove("detector") {
            Some(v) => DetectorConfig::deserialize(v).map_err(|e| Error::Config(format!("[detector]: {e}")))?,
            None => DetectorConfig::default(),
        };
        let resolution = ResolutionConfig::deserialize(toml::Value::Table(table)).map_err(config)?;
        resolution.validate()?;
        detector.validate()?;
        Ok(Settings { resolution, detector })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_sections() {
        let s = Settings::from_toml("max_findings = 3\n[detector]\nscore_threshold = 0.9\n").unwrap();
        assert_eq!(s.resolution.max_findings, 3);
        assert_eq!(s.detector.score_threshold, 0.9);
        assert_eq!(s.detector.nms_iou, 0.3);
    }

    #[test]
    fn empty_is_default() {
        assert_eq!(Settings::from_toml("").unwrap(), Settings::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Settings::from_toml("typo = 1").is_err());
        assert!(Settings::from_toml("[detector]\ntypo = 1").is_err());
        assert!(Settings::from_toml("[detector]\nscore_threshold = 2.0").is_err());
        assert!(Settings::from_toml("max_findings = 0").is_err());
    }
}
