//! Visual cue detection: find icon classes in a screenshot and turn them into
//! candidate dark pattern categories.

mod detector;
mod ncc;
mod sidecar;
mod template;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::model::DarkPatternCategory;

pub use detector::{detect_icons_template, DetectionOutput, DetectorConfig};
pub use sidecar::{detections_to_json, ingest_external_detections, DetectionSidecar, SidecarDetection};
pub use template::{load_template_dir, IconTemplate, ScaledTemplate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IconClass {
    Like,
    Dislike,
    Star,
    ToggleOn,
    Ad,
    AdLoader,
}

impl IconClass {
    pub const ALL: [IconClass; 6] = [
        IconClass::Like,
        IconClass::Dislike,
        IconClass::Star,
        IconClass::ToggleOn,
        IconClass::Ad,
        IconClass::AdLoader,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IconClass::Like => "like",
            IconClass::Dislike => "dislike",
            IconClass::Star => "star",
            IconClass::ToggleOn => "toggle_on",
            IconClass::Ad => "ad",
            IconClass::AdLoader => "ad_loader",
        }
    }

    /// 1-based id used for COCO categories.
    pub fn coco_id(self) -> u32 {
        IconClass::ALL.iter().position(|c| *c == self).unwrap() as u32 + 1
    }

    /// Categories an icon of this class hints at.
    pub fn likely_dark_patterns(self) -> &'static [DarkPatternCategory] {
        use DarkPatternCategory::*;
        match self {
            IconClass::Like | IconClass::Dislike | IconClass::Star => &[Nagging],
            IconClass::ToggleOn => &[DefaultChoice],
            IconClass::Ad => &[Nagging, DisguisedAds],
            IconClass::AdLoader => &[Nagging, Gamification],
        }
    }

    /// Splits a template file stem `<class>_<variant>` into its class,
    /// preferring the longest class name (`ad_loader_2` is an ad loader).
    pub fn from_template_stem(stem: &str) -> Option<IconClass> {
        let mut classes = IconClass::ALL;
        classes.sort_by_key(|c| std::cmp::Reverse(c.name().len()));
        classes
            .into_iter()
            .find(|c| stem == c.name() || stem.strip_prefix(c.name()).is_some_and(|rest| rest.starts_with('_')))
    }
}

impl fmt::Display for IconClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IconClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IconClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownIconClass(s.to_string()))
    }
}

impl Serialize for IconClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for IconClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IconDetection {
    #[serde(rename = "class")]
    pub icon_class: IconClass,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IconDpCandidate {
    pub category: DarkPatternCategory,
    pub confidence: f64,
    pub bbox: BoundingBox,
}

/// Maps detections onto likely categories, keeping the most confident
/// candidate per category. Output is ordered by category.
pub fn map_icons_to_dps(detections: &[IconDetection]) -> Vec<IconDpCandidate> {
    let mut best: BTreeMap<DarkPatternCategory, IconDpCandidate> = BTreeMap::new();
    for det in detections {
        for &category in det.icon_class.likely_dark_patterns() {
            let candidate = IconDpCandidate {
                category,
                confidence: det.confidence,
                bbox: det.bbox,
            };
            best.entry(category)
                .and_modify(|kept| {
                    if candidate.confidence > kept.confidence {
                        *kept = candidate.clone();
                    }
                })
                .or_insert(candidate);
        }
    }
    best.into_values().collect()
}
