use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dpscan::{ResolutionConfig, RuleSet, Settings};

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn warn(messages: &[String]) {
    for m in messages {
        eprintln!("warning: {m}");
    }
}

pub fn load_settings(path: Option<&PathBuf>) -> Result<Settings> {
    Ok(match path {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    })
}

pub fn load_rules(path: Option<&PathBuf>) -> Result<RuleSet> {
    Ok(match path {
        Some(p) => RuleSet::load(p).with_context(|| format!("loading rules from {}", p.display()))?,
        None => RuleSet::builtin(),
    })
}

/// Command-line threshold overrides; each one wins over the settings file.
#[derive(clap::Args, Clone, Debug, Default)]
pub struct Overrides {
    /// Minimum fused score for a finding.
    #[arg(long)]
    pub confidence_threshold: Option<f64>,
    /// Neighbourhood inflation as a fraction of segment size.
    #[arg(long)]
    pub proximity_factor: Option<f64>,
    /// Relative size gap that counts as a size difference.
    #[arg(long)]
    pub size_diff_threshold: Option<f64>,
    /// Share of pixels a brightness bin needs to classify a segment.
    #[arg(long)]
    pub brightness_share: Option<f64>,
    /// Weight of icon confidence in the fused score (segment weight is 1 - w).
    #[arg(long)]
    pub icon_weight: Option<f64>,
    /// Findings reported per screen.
    #[arg(long)]
    pub max_findings: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ResolutionConfig) -> Result<()> {
        if let Some(v) = self.confidence_threshold {
            cfg.confidence_threshold = v;
        }
        if let Some(v) = self.proximity_factor {
            cfg.proximity_factor = v;
        }
        if let Some(v) = self.size_diff_threshold {
            cfg.size_diff_threshold = v;
        }
        if let Some(v) = self.brightness_share {
            cfg.brightness_share = v;
        }
        if let Some(v) = self.icon_weight {
            cfg.icon_weight = v;
            cfg.segment_weight = 1.0 - v;
        }
        if let Some(v) = self.max_findings {
            cfg.max_findings = v;
        }
        cfg.validate()?;
        Ok(())
    }
}
