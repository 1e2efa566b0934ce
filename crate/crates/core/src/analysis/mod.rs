//! Per-segment evidence: lexical matches, brightness and neighbourhood.

pub mod brightness;
pub mod lexical;
pub mod spatial;

use std::collections::BTreeMap;

pub use brightness::{classify_brightness, classify_brightness_with, BrightnessClass, Histogram};
pub use lexical::{
    match_text, normalize, select_longest_per_category, stem, tokenize, LexicalRule, RuleSet, SlotSpec, TextMatch,
};
pub use spatial::{find_neighbors, neighbor_indices, neighborhood, spatial_profile, SpatialProfile};

use crate::error::Result;
use crate::geometry::BoundingBox;
use crate::model::{DarkPatternCategory, Segment, UiScreenshot};

/// Everything the resolver needs to know about one segment.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentEvidence {
    pub segment_id: String,
    pub bbox: BoundingBox,
    /// Longest match per category.
    pub matches: BTreeMap<DarkPatternCategory, TextMatch>,
    pub brightness: BrightnessClass,
    /// Indices into the evidence list.
    pub neighbors: Vec<usize>,
    pub profile: SpatialProfile,
}

/// Runs the three analyses over every segment of a screen.
pub fn analyze_segments(
    screen: &UiScreenshot,
    segments: &[Segment],
    rules: &RuleSet,
    proximity_factor: f64,
    brightness_share: f64,
) -> Result<Vec<SegmentEvidence>> {
    let (w, h) = (screen.width(), screen.height());
    segments
        .iter()
        .enumerate()
        .map(|(i, segment)| {
            let neighbors = neighbor_indices(i, segments, proximity_factor, w, h);
            let refs: Vec<&Segment> = neighbors.iter().map(|&j| &segments[j]).collect();
            Ok(SegmentEvidence {
                segment_id: segment.id.clone(),
                bbox: segment.bbox,
                matches: select_longest_per_category(&match_text(segment, rules)),
                brightness: classify_brightness_with(screen, segment.bbox, brightness_share)?,
                profile: spatial_profile(segment, &refs),
                neighbors,
            })
        })
        .collect()
}
