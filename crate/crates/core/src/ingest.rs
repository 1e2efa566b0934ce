//! Segment sidecars and the external OCR backend contract.
//!
//! A backend is any program invoked as `<command...> <screenshot-path>` that
//! prints a segment sidecar on stdout and exits 0.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::error::{decode_json, Error, Result};
use crate::geometry::BoundingBox;
use crate::model::{Segment, SegmentSource};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSidecar {
    pub screenshot_id: String,
    pub width: u32,
    pub height: u32,
    pub segments: Vec<SidecarSegment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarSegment {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(rename = "box")]
    pub bbox: [i64; 4],
    pub text: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IngestedSegments {
    pub screenshot_id: String,
    /// Ordered by (top, left, id).
    pub segments: Vec<Segment>,
    /// Entries that were dropped and why.
    pub diagnostics: Vec<String>,
}

/// Decodes and normalizes a segment sidecar for a `width` x `height` screen.
///
/// Empty or whitespace-only texts are dropped, boxes are clipped to the
/// screen, boxes entirely off-screen are dropped with a diagnostic, and
/// missing ids become the entry's ordinal position. The sidecar's declared
/// dimensions must match the screen.
pub fn read_segment_sidecar(document: &str, width: u32, height: u32) -> Result<IngestedSegments> {
    read_with_source(document, width, height, SegmentSource::Sidecar)
}

fn read_with_source(document: &str, width: u32, height: u32, source: SegmentSource) -> Result<IngestedSegments> {
    let sidecar: SegmentSidecar = decode_json(document)?;
    if (sidecar.width, sidecar.height) != (width, height) {
        return Err(Error::schema(
            "width",
            format!(
                "sidecar declares {}x{} but the screenshot is {width}x{height}",
                sidecar.width, sidecar.height
            ),
        ));
    }

    let mut seen = HashSet::new();
    let mut segments = Vec::with_capacity(sidecar.segments.len());
    let mut diagnostics = Vec::new();
    for (i, entry) in sidecar.segments.into_iter().enumerate() {
        let id = entry.id.unwrap_or_else(|| i.to_string());
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateSegmentId(id));
        }
        let bbox = BoundingBox::clamp_signed(entry.bbox, width, height)
            .map_err(|e| Error::schema(format!("segments[{i}].box"), e.to_string()))?;
        if entry.text.trim().is_empty() {
            diagnostics.push(format!("segment `{id}`: empty text, dropped"));
            continue;
        }
        let Some(bbox) = bbox else {
            diagnostics.push(format!(
                "segment `{id}`: box {:?} lies outside the {width}x{height} screen, dropped",
                entry.bbox
            ));
            continue;
        };
        segments.push(Segment {
            id,
            bbox,
            text: entry.text,
            source,
        });
    }
    segments.sort_by(|a, b| (a.bbox.top(), a.bbox.left(), &a.id).cmp(&(b.bbox.top(), b.bbox.left(), &b.id)));
    for d in &diagnostics {
        log::warn!("{d}");
    }
    Ok(IngestedSegments {
        screenshot_id: sidecar.screenshot_id,
        segments,
        diagnostics,
    })
}

/// Serializes segments back into sidecar form.
pub fn segments_to_json(screenshot_id: &str, width: u32, height: u32, segments: &[Segment]) -> String {
    let doc = SegmentSidecar {
        screenshot_id: screenshot_id.to_string(),
        width,
        height,
        segments: segments
            .iter()
            .map(|s| SidecarSegment {
                id: Some(s.id.clone()),
                bbox: s.bbox.to_array().map(i64::from),
                text: s.text.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("sidecar serializes")
}

/// Runs an OCR backend on `screenshot` and validates what it prints.
///
/// `command` is split on whitespace; the screenshot path is appended as the
/// last argument.
pub fn run_ocr_backend(screenshot: &Path, width: u32, height: u32, command: &str) -> Result<IngestedSegments> {
    let mut words = command.split_whitespace();
    let program = words
        .next()
        .ok_or_else(|| Error::Config("empty OCR backend command".into()))?;
    let output = Command::new(program)
        .args(words)
        .arg(screenshot)
        .output()
        .map_err(|e| Error::io(program, e))?;
    if !output.status.success() {
        return Err(Error::Backend {
            status: output.status.to_string(),
            stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
        });
    }
    let stdout =
        String::from_utf8(output.stdout).map_err(|e| Error::schema("", format!("backend output is not UTF-8: {e}")))?;
    read_with_source(&stdout, width, height, SegmentSource::OcrBackend)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn doc(entries: &str) -> String {
        format!(r#"{{"screenshot_id":"s","width":100,"height":80,"segments":[{entries}]}}"#)
    }

    #[test]
    fn empty_text_is_dropped() {
        let d = doc(r#"{"id":"a","box":[0,0,10,10],"text":"Buy now"},
               {"id":"b","box":[0,20,10,10],"text":""},
               {"id":"c","box":[0,40,10,10],"text":"Only 3 left"}"#);
        let got = read_segment_sidecar(&d, 100, 80).unwrap();
        assert_eq!(got.segments.len(), 2);
        assert_eq!(got.diagnostics.len(), 1);
    }

    #[test]
    fn whitespace_text_is_dropped() {
        let d = doc(r#"{"box":[0,0,10,10],"text":" \t\n"}"#);
        assert!(read_segment_sidecar(&d, 100, 80).unwrap().segments.is_empty());
    }

    #[test]
    fn overhanging_box_is_clamped() {
        let d = doc(r#"{"id":"a","box":[90,0,15,10],"text":"x"}"#);
        let got = read_segment_sidecar(&d, 100, 80).unwrap();
        assert_eq!(got.segments[0].bbox.to_array(), [90, 0, 10, 10]);
    }

    #[test]
    fn off_screen_box_is_dropped_with_diagnostic() {
        let d = doc(r#"{"id":"a","box":[100,0,5,5],"text":"x"},{"id":"b","box":[-9,-9,4,4],"text":"y"}"#);
        let got = read_segment_sidecar(&d, 100, 80).unwrap();
        assert!(got.segments.is_empty());
        assert_eq!(got.diagnostics.len(), 2);
        assert!(got.diagnostics[0].contains("`a`"));
    }

    #[test]
    fn duplicate_ids_name_the_id() {
        let d = doc(r#"{"id":"dup","box":[0,0,5,5],"text":"x"},{"id":"dup","box":[9,0,5,5],"text":"y"}"#);
        let err = read_segment_sidecar(&d, 100, 80).unwrap_err().to_string();
        assert!(err.contains("dup"), "{err}");
    }

    #[test]
    fn missing_ids_become_ordinals() {
        let d = doc(r#"{"box":[0,50,5,5],"text":"x"},{"box":[0,0,5,5],"text":"y"}"#);
        let got = read_segment_sidecar(&d, 100, 80).unwrap();
        let ids: Vec<_> = got.segments.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["1", "0"]);
    }

    #[test]
    fn order_is_top_then_left() {
        let d = doc(r#"{"id":"c","box":[50,10,5,5],"text":"x"},
               {"id":"b","box":[10,10,5,5],"text":"x"},
               {"id":"a","box":[90,0,5,5],"text":"x"}"#);
        let got = read_segment_sidecar(&d, 100, 80).unwrap();
        let ids: Vec<_> = got.segments.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
    }

    #[test]
    fn malformed_field_reports_path() {
        let d = doc(r#"{"id":"a","box":[0,0,5],"text":"x"}"#);
        let err = read_segment_sidecar(&d, 100, 80).unwrap_err().to_string();
        assert!(err.contains("segments[0].box"), "{err}");
    }

    #[test]
    fn degenerate_box_reports_path() {
        let d = doc(r#"{"id":"a","box":[0,0,0,5],"text":"x"}"#);
        let err = read_segment_sidecar(&d, 100, 80).unwrap_err().to_string();
        assert!(err.contains("segments[0].box"), "{err}");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let d = doc("");
        assert!(read_segment_sidecar(&d, 100, 81).is_err());
    }

    fn arb_entry() -> impl Strategy<Value = (Option<u8>, [i64; 4], String)> {
        (
            proptest::option::of(any::<u8>()),
            (-20i64..120, -20i64..100, 1i64..60, 1i64..60).prop_map(|(l, t, w, h)| [l, t, w, h]),
            "[a-z ]{0,12}",
        )
    }

    proptest! {
        #[test]
        fn rereading_is_idempotent(entries in proptest::collection::vec(arb_entry(), 0..12)) {
            let mut seen = HashSet::new();
            let segments: Vec<SidecarSegment> = entries
                .into_iter()
                .filter(|(id, _, _)| id.is_none_or(|v| seen.insert(v)))
                .map(|(id, bbox, text)| SidecarSegment { id: id.map(|v| format!("id{v}")), bbox, text })
                .collect();
            let doc = SegmentSidecar { screenshot_id: "s".into(), width: 100, height: 80, segments };
            let first = read_segment_sidecar(&serde_json::to_string(&doc).unwrap(), 100, 80).unwrap();
            for s in &first.segments {
                prop_assert!(s.bbox.fits_within(100, 80));
                prop_assert!(!s.text.trim().is_empty());
            }
            let again = read_segment_sidecar(&segments_to_json("s", 100, 80, &first.segments), 100, 80).unwrap();
            prop_assert_eq!(again.segments, first.segments);
        }
    }

    #[cfg(unix)]
    mod backend {
        use super::*;
        use std::os::unix::fs::PermissionsExt;

        fn script(dir: &Path, body: &str) -> String {
            let path = dir.join("backend.sh");
            std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
            std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
            path.display().to_string()
        }

        #[test]
        fn valid_output_passes_through() {
            let dir = tempfile::tempdir().unwrap();
            let entries: Vec<String> = (0..5)
                .map(|i| format!(r#"{{"box":[{},0,5,5],"text":"t{i}"}}"#, i * 10))
                .collect();
            let body = format!(
                "cat <<'EOF'\n{{\"screenshot_id\":\"s\",\"width\":100,\"height\":80,\"segments\":[{}]}}\nEOF",
                entries.join(",")
            );
            let cmd = script(dir.path(), &body);
            let got = run_ocr_backend(Path::new("s.png"), 100, 80, &cmd).unwrap();
            assert_eq!(got.segments.len(), 5);
            assert!(got.segments.iter().all(|s| s.source == SegmentSource::OcrBackend));
        }

        #[test]
        fn screenshot_path_is_last_argument() {
            let dir = tempfile::tempdir().unwrap();
            let body = r#"printf '{"screenshot_id":"%s","width":1,"height":1,"segments":[]}' "$2""#;
            let cmd = format!("{} extra", script(dir.path(), body));
            let got = run_ocr_backend(Path::new("shot.png"), 1, 1, &cmd).unwrap();
            assert_eq!(got.screenshot_id, "shot.png");
        }

        #[test]
        fn nonzero_exit_carries_stderr() {
            let dir = tempfile::tempdir().unwrap();
            let cmd = script(dir.path(), "echo 'model missing' >&2\nexit 2");
            let err = run_ocr_backend(Path::new("s.png"), 1, 1, &cmd).unwrap_err();
            assert!(matches!(err, Error::Backend { .. }));
            assert!(err.to_string().contains("model missing"), "{err}");
        }

        #[test]
        fn garbage_output_is_a_schema_error() {
            let dir = tempfile::tempdir().unwrap();
            let cmd = script(dir.path(), "echo 'not json at all'");
            let err = run_ocr_backend(Path::new("s.png"), 1, 1, &cmd).unwrap_err();
            assert!(matches!(err, Error::Schema { .. }), "{err}");
        }

        #[test]
        fn empty_command_is_rejected() {
            assert!(run_ocr_backend(Path::new("s.png"), 1, 1, "  ").is_err());
        }
    }
}
