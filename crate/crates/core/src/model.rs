//! Shared domain types.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use image::RgbImage;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Mobile,
    Web,
    #[default]
    Unknown,
}

/// A decoded screenshot: the unit of analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct UiScreenshot {
    pub id: String,
    pub domain: Domain,
    pixels: RgbImage,
}

impl UiScreenshot {
    pub fn new(id: impl Into<String>, pixels: RgbImage, domain: Domain) -> Result<Self> {
        if pixels.width() == 0 || pixels.height() == 0 {
            return Err(Error::InvalidScreenshot(format!(
                "empty raster {}x{}",
                pixels.width(),
                pixels.height()
            )));
        }
        Ok(UiScreenshot {
            id: id.into(),
            domain,
            pixels,
        })
    }

    /// A screenshot filled with one colour.
    pub fn uniform(id: impl Into<String>, width: u32, height: u32, rgb: [u8; 3]) -> Result<Self> {
        UiScreenshot::new(
            id,
            RgbImage::from_pixel(width, height, image::Rgb(rgb)),
            Domain::Unknown,
        )
    }

    /// Loads a PNG or JPEG; the id is the file stem.
    pub fn load(path: &Path, domain: Domain) -> Result<Self> {
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        UiScreenshot::new(id, img.to_rgb8(), domain)
    }

    pub fn width(&self) -> u32 {
        self.pixels.width()
    }

    pub fn height(&self) -> u32 {
        self.pixels.height()
    }

    pub fn pixels(&self) -> &RgbImage {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut RgbImage {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> RgbImage {
        self.pixels
    }

    pub fn bounds(&self) -> BoundingBox {
        BoundingBox::new(0, 0, self.width(), self.height()).expect("non-empty screenshot")
    }
}

/// The ten single-screen dark pattern categories, plus the `NonDp` sentinel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DarkPatternCategory {
    ActivityMessage,
    HighDemandMessage,
    LowStockMessage,
    LimitedTimeMessage,
    CountdownTimer,
    AttentionDistraction,
    DefaultChoice,
    DisguisedAds,
    Nagging,
    Gamification,
    NonDp,
}

impl DarkPatternCategory {
    /// The ten real categories, in declaration order.
    pub const ALL: [DarkPatternCategory; 10] = [
        DarkPatternCategory::ActivityMessage,
        DarkPatternCategory::HighDemandMessage,
        DarkPatternCategory::LowStockMessage,
        DarkPatternCategory::LimitedTimeMessage,
        DarkPatternCategory::CountdownTimer,
        DarkPatternCategory::AttentionDistraction,
        DarkPatternCategory::DefaultChoice,
        DarkPatternCategory::DisguisedAds,
        DarkPatternCategory::Nagging,
        DarkPatternCategory::Gamification,
    ];

    /// Snake-case name used in every JSON document.
    pub fn name(self) -> &'static str {
        use DarkPatternCategory::*;
        match self {
            ActivityMessage => "activity_message",
            HighDemandMessage => "high_demand_message",
            LowStockMessage => "low_stock_message",
            LimitedTimeMessage => "limited_time_message",
            CountdownTimer => "countdown_timer",
            AttentionDistraction => "attention_distraction",
            DefaultChoice => "default_choice",
            DisguisedAds => "disguised_ads",
            Nagging => "nagging",
            Gamification => "gamification",
            NonDp => "non_dp",
        }
    }

    /// Human readable label for reports.
    pub fn title(self) -> &'static str {
        use DarkPatternCategory::*;
        match self {
            ActivityMessage => "Activity Message",
            HighDemandMessage => "High Demand Message",
            LowStockMessage => "Low Stock Message",
            LimitedTimeMessage => "Limited Time Message",
            CountdownTimer => "Countdown Timer",
            AttentionDistraction => "Attention Distraction",
            DefaultChoice => "Default Choice",
            DisguisedAds => "Disguised Ads",
            Nagging => "Nagging",
            Gamification => "Gamification",
            NonDp => "Non-DP",
        }
    }

    pub fn is_dark_pattern(self) -> bool {
        self != DarkPatternCategory::NonDp
    }
}

impl fmt::Display for DarkPatternCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DarkPatternCategory {
    type Err = Error;

    /// Accepts `snake_case`, `PascalCase` and spaced titles, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | ' ' | '-'))
            .flat_map(char::to_lowercase)
            .collect();
        DarkPatternCategory::ALL
            .into_iter()
            .chain([DarkPatternCategory::NonDp])
            .find(|c| c.name().replace('_', "") == key)
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

impl Serialize for DarkPatternCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for DarkPatternCategory {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentSource {
    #[default]
    Sidecar,
    OcrBackend,
}

/// An OCR'd text region.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub id: String,
    pub bbox: BoundingBox,
    pub text: String,
    pub source: SegmentSource,
}

impl Segment {
    pub fn new(id: impl Into<String>, bbox: BoundingBox, text: impl Into<String>) -> Self {
        Segment {
            id: id.into(),
            bbox,
            text: text.into(),
            source: SegmentSource::Sidecar,
        }
    }
}

/// A labelled dark pattern instance. Never carries `NonDp`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundTruthLabel {
    pub category: DarkPatternCategory,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

impl GroundTruthLabel {
    pub fn new(category: DarkPatternCategory, bbox: BoundingBox) -> Result<Self> {
        if !category.is_dark_pattern() {
            return Err(Error::UnknownCategory("non_dp is not a valid label category".into()));
        }
        Ok(GroundTruthLabel { category, bbox })
    }
}

impl<'de> Deserialize<'de> for GroundTruthLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            category: DarkPatternCategory,
            #[serde(rename = "box")]
            bbox: BoundingBox,
        }
        let raw = Raw::deserialize(deserializer)?;
        GroundTruthLabel::new(raw.category, raw.bbox).map_err(serde::de::Error::custom)
    }
}
