use serde::{Deserialize, Serialize};

use super::{IconClass, IconDetection};
use crate::error::{decode_json, Error, Result};
use crate::geometry::BoundingBox;

/// Icon detection document exchanged with external detectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionSidecar {
    pub screenshot_id: String,
    pub detections: Vec<SidecarDetection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarDetection {
    pub class: IconClass,
    #[serde(rename = "box")]
    pub bbox: [i64; 4],
    pub confidence: f64,
}

/// Decodes and validates a detection sidecar for a `width` x `height` screen.
///
/// Boxes are clipped to the screen; boxes entirely off-screen are dropped
/// with a warning. Confidences outside `[0, 1]` are rejected.
pub fn ingest_external_detections(document: &str, width: u32, height: u32) -> Result<(String, Vec<IconDetection>)> {
    let sidecar: DetectionSidecar = decode_json(document)?;
    let mut out = Vec::with_capacity(sidecar.detections.len());
    for (i, d) in sidecar.detections.iter().enumerate() {
        if !(0.0..=1.0).contains(&d.confidence) {
            return Err(Error::schema(
                format!("detections[{i}].confidence"),
                format!("confidence {} is outside [0, 1]", d.confidence),
            ));
        }
        let bbox = BoundingBox::clamp_signed(d.bbox, width, height)
            .map_err(|e| Error::schema(format!("detections[{i}].box"), e.to_string()))?;
        match bbox {
            Some(bbox) => out.push(IconDetection {
                icon_class: d.class,
                bbox,
                confidence: d.confidence,
            }),
            None => log::warn!(
                "detections[{i}]: box {:?} lies outside the {width}x{height} screen, dropped",
                d.bbox
            ),
        }
    }
    Ok((sidecar.screenshot_id, out))
}

pub fn detections_to_json(screenshot_id: &str, detections: &[IconDetection]) -> String {
    let doc = DetectionSidecar {
        screenshot_id: screenshot_id.to_string(),
        detections: detections
            .iter()
            .map(|d| SidecarDetection {
                class: d.icon_class,
                bbox: d.bbox.to_array().map(i64::from),
                confidence: d.confidence,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("sidecar serializes")
}
