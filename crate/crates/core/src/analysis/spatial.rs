//! Neighbourhoods and relative sizes.

use serde::Serialize;

use crate::geometry::BoundingBox;
use crate::model::Segment;

pub const DEFAULT_PROXIMITY_FACTOR: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpatialProfile {
    pub segment_id: String,
    pub neighbor_ids: Vec<String>,
    pub rel_width: f64,
    pub rel_height: f64,
}

/// `bbox` grown by `factor * width` on the left and right and
/// `factor * height` on the top and bottom, clipped to the screen.
///
/// Fractional edges are rounded outward. Since segment boxes have integer
/// edges this gives exactly the same intersections as the real-valued region.
pub fn neighborhood(bbox: &BoundingBox, factor: f64, screen_width: u32, screen_height: u32) -> BoundingBox {
    let dx = factor * f64::from(bbox.width());
    let dy = factor * f64::from(bbox.height());
    let clip = |v: f64, hi: u32| v.clamp(0.0, f64::from(hi)) as u32;
    let left = clip((f64::from(bbox.left()) - dx).floor(), screen_width);
    let top = clip((f64::from(bbox.top()) - dy).floor(), screen_height);
    let right = clip((f64::from(bbox.right()) + dx).ceil(), screen_width);
    let bottom = clip((f64::from(bbox.bottom()) + dy).ceil(), screen_height);
    BoundingBox::from_edges(left, top, right, bottom).unwrap_or(*bbox)
}

/// Indices into `all` whose boxes overlap `all[index]`'s neighbourhood
/// (touching edges do not count). A segment never neighbours itself.
pub fn neighbor_indices(
    index: usize,
    all: &[Segment],
    factor: f64,
    screen_width: u32,
    screen_height: u32,
) -> Vec<usize> {
    let zone = neighborhood(&all[index].bbox, factor, screen_width, screen_height);
    all.iter()
        .enumerate()
        .filter(|&(j, other)| j != index && other.id != all[index].id && zone.intersection_area(&other.bbox) > 0)
        .map(|(j, _)| j)
        .collect()
}

/// Ids of the segments in `all` that neighbour `segment`.
pub fn find_neighbors(
    segment: &Segment,
    all: &[Segment],
    factor: f64,
    screen_width: u32,
    screen_height: u32,
) -> Vec<String> {
    let zone = neighborhood(&segment.bbox, factor, screen_width, screen_height);
    all.iter()
        .filter(|other| other.id != segment.id && zone.intersection_area(&other.bbox) > 0)
        .map(|other| other.id.clone())
        .collect()
}

/// Width and height relative to the largest in `{segment} ∪ neighbors`.
pub fn spatial_profile(segment: &Segment, neighbors: &[&Segment]) -> SpatialProfile {
    let max_w = neighbors
        .iter()
        .map(|n| n.bbox.width())
        .fold(segment.bbox.width(), u32::max);
    let max_h = neighbors
        .iter()
        .map(|n| n.bbox.height())
        .fold(segment.bbox.height(), u32::max);
    SpatialProfile {
        segment_id: segment.id.clone(),
        neighbor_ids: neighbors.iter().map(|n| n.id.clone()).collect(),
        rel_width: f64::from(segment.bbox.width()) / f64::from(max_w),
        rel_height: f64::from(segment.bbox.height()) / f64::from(max_h),
    }
}
