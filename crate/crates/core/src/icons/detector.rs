//! Multi-scale template matcher.
//!
//! Each template is correlated against the screen at every configured scale.
//! Peaks above `candidate_threshold` are pruned per template, then refined by
//! a direct search over nearby integer sizes and offsets, so icons drawn
//! between two configured scales are still localized tightly. Survivors above
//! `score_threshold` go through greedy per-class non-maximum suppression.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::ncc::{score_at, Kernel, ScreenSpectrum};
use super::template::IconTemplate;
use super::{IconClass, IconDetection};
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::model::UiScreenshot;
use crate::par::{self, Execution};
use crate::raster::GrayPlane;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub score_threshold: f64,
    pub nms_iou: f64,
    pub scales: Vec<f64>,
    /// Minimum correlation for a coarse peak to be refined.
    pub candidate_threshold: f64,
    /// Ratio spanned by the size search around each coarse peak (the
    /// search covers `[s / sqrt(span), s * sqrt(span)]`). `1.0` disables it.
    pub refine_span: f64,
    /// Coarse peaks kept per template after pruning.
    pub max_candidates: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            score_threshold: 0.85,
            nms_iou: 0.3,
            scales: vec![0.75, 1.0, 1.25, 1.5],
            candidate_threshold: 0.5,
            refine_span: 1.25,
            max_candidates: 16,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !in_unit(self.score_threshold) {
            return Err(Error::Config(format!(
                "score_threshold must be in (0, 1], got {}",
                self.score_threshold
            )));
        }
        if !in_unit(self.nms_iou) {
            return Err(Error::Config(format!(
                "nms_iou must be in (0, 1], got {}",
                self.nms_iou
            )));
        }
        if self.scales.is_empty() || self.scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Config(
                "scales must be a non-empty list of positive numbers".into(),
            ));
        }
        if !(self.candidate_threshold.is_finite() && self.candidate_threshold <= self.score_threshold) {
            return Err(Error::Config(
                "candidate_threshold must not exceed score_threshold".into(),
            ));
        }
        if !(self.refine_span.is_finite() && self.refine_span >= 1.0) {
            return Err(Error::Config("refine_span must be >= 1".into()));
        }
        Ok(())
    }

    /// A geometric scale ladder from `min` to `max` whose neighbouring
    /// entries differ by at most `ratio`.
    pub fn scale_ladder(min: f64, max: f64, ratio: f64) -> Vec<f64> {
        let steps = ((max / min).ln() / ratio.ln()).ceil().max(0.0) as usize;
        if steps == 0 {
            return vec![min];
        }
        let step = (max / min).powf(1.0 / steps as f64);
        (0..=steps).map(|i| min * step.powi(i as i32)).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DetectionOutput {
    /// Sorted by (class, top, left).
    pub detections: Vec<IconDetection>,
    /// Templates that were skipped and why.
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
struct Hit {
    template: usize,
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    score: f64,
}

impl Hit {
    fn bbox(&self) -> BoundingBox {
        BoundingBox::new(self.x, self.y, self.w, self.h).expect("template sizes are non-zero")
    }
}

fn by_score_desc(a: &Hit, b: &Hit) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.y.cmp(&b.y))
        .then(a.x.cmp(&b.x))
        .then(a.w.cmp(&b.w))
        .then(a.template.cmp(&b.template))
}

/// Greedy NMS over hits already sorted best-first.
fn suppress(sorted: Vec<Hit>, iou: f64, limit: usize) -> Vec<Hit> {
    let mut kept: Vec<Hit> = Vec::new();
    for hit in sorted {
        if kept.len() >= limit {
            break;
        }
        if kept.iter().all(|k| k.bbox().strict_iou(&hit.bbox()) < iou) {
            kept.push(hit);
        }
    }
    kept
}

/// Exhaustive search over sizes within `span` of the coarse hit and offsets
/// around its centre, scored directly.
fn refine(plane: &GrayPlane, template: &IconTemplate, coarse: Hit, span: f64) -> Hit {
    let (nw, nh) = (template.native_width(), template.native_height());
    let root = span.sqrt();
    let lo = ((f64::from(coarse.w) / root).floor() as u32).max(1);
    let hi = (f64::from(coarse.w) * root).ceil() as u32;
    let cx = f64::from(coarse.x) + f64::from(coarse.w) / 2.0;
    let cy = f64::from(coarse.y) + f64::from(coarse.h) / 2.0;
    let (sw, sh) = (plane.width as i64, plane.height as i64);

    let mut best = coarse;
    best.score = f64::NEG_INFINITY;
    for w in lo..=hi {
        let h = ((f64::from(nh) * f64::from(w) / f64::from(nw)).round() as u32).max(1);
        if i64::from(w) > sw || i64::from(h) > sh {
            continue;
        }
        let Some(kernel) = Kernel::new(&template.resized(w, h)) else {
            continue;
        };
        let radius = (0.1 * f64::from(w.max(h))).ceil().max(2.0) as i64;
        let x0 = (cx - f64::from(w) / 2.0).round() as i64;
        let y0 = (cy - f64::from(h) / 2.0).round() as i64;
        for y in (y0 - radius).max(0)..=(y0 + radius).min(sh - i64::from(h)) {
            for x in (x0 - radius).max(0)..=(x0 + radius).min(sw - i64::from(w)) {
                let score = score_at(plane, &kernel, x as usize, y as usize);
                let hit = Hit {
                    template: coarse.template,
                    x: x as u32,
                    y: y as u32,
                    w,
                    h,
                    score,
                };
                if by_score_desc(&hit, &best) == Ordering::Less {
                    best = hit;
                }
            }
        }
    }
    best
}

/// Finds icons by masked normalized cross-correlation over grayscale.
///
/// Templates that do not fit the screen at any scale (or are flat over their
/// mask) are skipped and reported in `diagnostics`. The result is a pure
/// function of its inputs; `exec` only decides how the work is scheduled.
pub fn detect_icons_template(
    screen: &UiScreenshot,
    templates: &[IconTemplate],
    cfg: &DetectorConfig,
    exec: Execution,
) -> Result<DetectionOutput> {
    cfg.validate()?;
    if templates.is_empty() {
        return Err(Error::EmptyInput("no icon templates".into()));
    }
    let plane = GrayPlane::from_rgb(screen.pixels());
    let spectrum = ScreenSpectrum::new(&plane);
    let (sw, sh) = (screen.width(), screen.height());

    let mut diagnostics = Vec::new();
    let mut jobs: Vec<(usize, u32, u32)> = Vec::new();
    for (ti, template) in templates.iter().enumerate() {
        let mut sizes: Vec<(u32, u32)> = cfg
            .scales
            .iter()
            .map(|&s| template.size_at(s))
            .filter(|&(w, h)| w <= sw && h <= sh)
            .collect();
        sizes.dedup();
        if sizes.is_empty() {
            diagnostics.push(format!(
                "template `{}` ({}x{}) is larger than the {sw}x{sh} screen at every scale",
                template.name,
                template.native_width(),
                template.native_height()
            ));
        }
        jobs.extend(sizes.into_iter().map(|(w, h)| (ti, w, h)));
    }

    let coarse: Vec<Vec<Hit>> = par::map(exec, &jobs, |&(ti, w, h)| {
        let Some(kernel) = Kernel::new(&templates[ti].resized(w, h)) else {
            return Vec::new();
        };
        let Some(map) = spectrum.score_map(&kernel) else {
            return Vec::new();
        };
        map.peaks(cfg.candidate_threshold)
            .into_iter()
            .map(|(x, y, score)| Hit {
                template: ti,
                x: x as u32,
                y: y as u32,
                w,
                h,
                score,
            })
            .collect()
    });

    let mut per_template: Vec<Vec<Hit>> = vec![Vec::new(); templates.len()];
    for hit in coarse.into_iter().flatten() {
        per_template[hit.template].push(hit);
    }
    let mut seeds = Vec::new();
    for mut hits in per_template {
        hits.sort_by(by_score_desc);
        seeds.extend(suppress(hits, cfg.nms_iou, cfg.max_candidates));
    }

    let refined: Vec<Hit> = par::map(exec, &seeds, |&hit| {
        let template = &templates[hit.template];
        if cfg.refine_span > 1.0 {
            refine(&plane, template, hit, cfg.refine_span)
        } else {
            let kernel = Kernel::new(&template.resized(hit.w, hit.h));
            let score = kernel.map_or(0.0, |k| score_at(&plane, &k, hit.x as usize, hit.y as usize));
            Hit { score, ..hit }
        }
    });

    let mut detections = Vec::new();
    for class in IconClass::ALL {
        let mut hits: Vec<Hit> = refined
            .iter()
            .copied()
            .filter(|h| templates[h.template].icon_class == class && h.score >= cfg.score_threshold)
            .collect();
        hits.sort_by(by_score_desc);
        for hit in suppress(hits, cfg.nms_iou, usize::MAX) {
            detections.push(IconDetection {
                icon_class: class,
                bbox: hit.bbox(),
                confidence: hit.score.clamp(0.0, 1.0),
            });
        }
    }
    detections.sort_by_key(|d| (d.icon_class, d.bbox.top(), d.bbox.left()));
    Ok(DetectionOutput {
        detections,
        diagnostics,
    })
}
