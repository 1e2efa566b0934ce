//! Training data synthesis: paste icon templates onto background screens at
//! random sizes and positions and emit COCO annotations with a seeded
//! train/validation split.
//!
//! Randomness comes from ChaCha8 seeded through SplitMix64, both fully
//! specified algorithms, so datasets reproduce across platforms.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::icons::{load_template_dir, IconClass, IconTemplate};
use crate::model::{Domain, UiScreenshot};
use crate::par::{self, Execution};

pub const PRNG_NAME: &str = "chacha8+splitmix64";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub min_scale: f64,
    pub max_scale: f64,
    /// Share of composites assigned to the training split.
    pub split_ratio: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            min_scale: 0.5,
            max_scale: 2.0,
            split_ratio: 0.8,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_scale > 0.0 && self.min_scale <= self.max_scale && self.max_scale.is_finite()) {
            return Err(Error::Config(format!(
                "scale range [{}, {}] is invalid",
                self.min_scale, self.max_scale
            )));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::Config(format!(
                "split ratio must be in (0, 1), got {}",
                self.split_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositeSpec {
    pub background_id: String,
    pub icon_class: IconClass,
    pub variant_id: String,
    pub placed_box: BoundingBox,
    pub scale: f64,
    pub seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Seed for one (background, template) pair of a dataset.
pub fn pair_seed(dataset_seed: u64, background_id: &str, variant_id: &str) -> u64 {
    splitmix64(dataset_seed ^ splitmix64(fnv1a(background_id) ^ fnv1a(variant_id).rotate_left(32)))
}

/// Pastes `template` onto `background` at a seeded random scale and position.
///
/// Pixels outside the placed box, and transparent template pixels inside it,
/// keep their background values.
pub fn synthesize_screen(
    background: &UiScreenshot,
    template: &IconTemplate,
    seed: u64,
    cfg: &SynthConfig,
) -> Result<(UiScreenshot, CompositeSpec)> {
    cfg.validate()?;
    let (bw, bh) = (background.width(), background.height());
    let (nw, nh) = (template.native_width(), template.native_height());
    let fit = (f64::from(bw) / f64::from(nw)).min(f64::from(bh) / f64::from(nh));
    let hi = cfg.max_scale.min(fit);
    if hi < cfg.min_scale {
        return Err(Error::TemplateFit {
            name: template.name.clone(),
            message: format!(
                "{nw}x{nh} at min scale {} exceeds the {bw}x{bh} background `{}`",
                cfg.min_scale, background.id
            ),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = if hi > cfg.min_scale {
        rng.random_range(cfg.min_scale..=hi)
    } else {
        cfg.min_scale
    };
    let (w, h) = template.size_at(scale);
    let (w, h) = (w.min(bw), h.min(bh));
    let left = rng.random_range(0..=bw - w);
    let top = rng.random_range(0..=bh - h);
    let placed_box = BoundingBox::new(left, top, w, h)?;

    let scaled = template.resized(w, h);
    let mut pixels = background.pixels().clone();
    for y in 0..h {
        for x in 0..w {
            if scaled.is_opaque(x, y) {
                pixels.put_pixel(left + x, top + y, *scaled.rgb.get_pixel(x, y));
            }
        }
    }
    let composite = UiScreenshot::new(
        format!("{}__{}", background.id, template.name),
        pixels,
        background.domain,
    )?;
    let spec = CompositeSpec {
        background_id: background.id.clone(),
        icon_class: template.icon_class,
        variant_id: template.name.clone(),
        placed_box,
        scale,
        seed,
    };
    Ok((composite, spec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
}

/// One manifest line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Composite path relative to the dataset directory.
    pub file: String,
    pub width: u32,
    pub height: u32,
    pub split: Split,
    pub prng: String,
    #[serde(flatten)]
    pub spec: CompositeSpec,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetManifest {
    /// Ordered by (background id, icon class, variant id).
    pub entries: Vec<ManifestEntry>,
    /// Per-file problems that were skipped.
    pub diagnostics: Vec<String>,
}

impl DatasetManifest {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn to_jsonl(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("manifest entry serializes") + "\n")
            .collect()
    }
}

#[derive(Serialize)]
struct CocoImage<'a> {
    id: usize,
    file_name: &'a str,
    width: u32,
    height: u32,
}

#[derive(Serialize)]
struct CocoAnnotation {
    id: usize,
    image_id: usize,
    category_id: u32,
    bbox: [u32; 4],
    area: u64,
    iscrowd: u8,
}

#[derive(Serialize)]
struct CocoCategory {
    id: u32,
    name: &'static str,
    supercategory: &'static str,
}

#[derive(Serialize)]
struct CocoFile<'a> {
    images: Vec<CocoImage<'a>>,
    annotations: Vec<CocoAnnotation>,
    categories: Vec<CocoCategory>,
}

/// COCO object-detection document for one split. Image and annotation ids
/// are 1-based manifest positions, so they agree across splits.
pub fn coco_json(manifest: &DatasetManifest, split: Split) -> String {
    let mut images = Vec::new();
    let mut annotations = Vec::new();
    for (i, e) in manifest.entries.iter().enumerate() {
        if e.split != split {
            continue;
        }
        let id = i + 1;
        images.push(CocoImage {
            id,
            file_name: &e.file,
            width: e.width,
            height: e.height,
        });
        annotations.push(CocoAnnotation {
            id,
            image_id: id,
            category_id: e.spec.icon_class.coco_id(),
            bbox: e.spec.placed_box.to_array(),
            area: e.spec.placed_box.area(),
            iscrowd: 0,
        });
    }
    let categories = IconClass::ALL
        .into_iter()
        .map(|c| CocoCategory {
            id: c.coco_id(),
            name: c.name(),
            supercategory: "icon",
        })
        .collect();
    serde_json::to_string_pretty(&CocoFile {
        images,
        annotations,
        categories,
    })
    .expect("coco serializes")
}

fn image_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| {
                let ext = ext.to_string_lossy().to_ascii_lowercase();
                matches!(ext.as_str(), "png" | "jpg" | "jpeg")
            })
        })
        .collect();
    paths.sort();
    Ok(paths)
}

/// Composites every (background, template) pair into `out`.
///
/// Writes `images/<background>__<variant>.png`, `manifest.jsonl`,
/// `annotations/train.json` and `annotations/validation.json`. Unreadable
/// images are reported and skipped; no usable backgrounds or templates is an
/// error.
pub fn generate_dataset(
    backgrounds: &Path,
    templates: &Path,
    out: &Path,
    seed: u64,
    cfg: &SynthConfig,
    exec: Execution,
) -> Result<DatasetManifest> {
    cfg.validate()?;
    let mut diagnostics = Vec::new();

    let mut screens = Vec::new();
    for path in image_files(backgrounds)? {
        match UiScreenshot::load(&path, Domain::Unknown) {
            Ok(s) => screens.push(s),
            Err(e) => diagnostics.push(format!("skipping background: {e}")),
        }
    }
    let (mut icons, template_diags) = load_template_dir(templates)?;
    diagnostics.extend(template_diags);
    if screens.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no usable backgrounds in {}",
            backgrounds.display()
        )));
    }
    if icons.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no usable templates in {}",
            templates.display()
        )));
    }
    screens.sort_by(|a, b| a.id.cmp(&b.id));
    icons.sort_by(|a, b| (a.icon_class, &a.name).cmp(&(b.icon_class, &b.name)));

    let images_dir = out.join("images");
    let annotations_dir = out.join("annotations");
    for dir in [&images_dir, &annotations_dir] {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let pairs: Vec<(usize, usize)> = (0..screens.len())
        .flat_map(|b| (0..icons.len()).map(move |t| (b, t)))
        .collect();
    let results = par::map(exec, &pairs, |&(b, t)| -> Result<ManifestEntry> {
        let (bg, icon) = (&screens[b], &icons[t]);
        let seed = pair_seed(seed, &bg.id, &icon.name);
        let (composite, spec) = synthesize_screen(bg, icon, seed, cfg)?;
        let file = format!("images/{}.png", composite.id);
        let path = out.join(&file);
        composite
            .pixels()
            .save(&path)
            .map_err(|source| Error::Image { path, source })?;
        Ok(ManifestEntry {
            file,
            width: composite.width(),
            height: composite.height(),
            split: Split::Train,
            prng: PRNG_NAME.to_string(),
            spec,
        })
    });

    let mut entries = Vec::with_capacity(results.len());
    for result in results {
        match result {
            Ok(entry) => entries.push(entry),
            Err(e) => diagnostics.push(format!("skipping composite: {e}")),
        }
    }

    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(splitmix64(seed)));
    let n_train = (entries.len() as f64 * cfg.split_ratio).round() as usize;
    for &i in &order[n_train..] {
        entries[i].split = Split::Validation;
    }

    let manifest = DatasetManifest { entries, diagnostics };
    let write = |path: PathBuf, text: String| fs::write(&path, text).map_err(|e| Error::io(path, e));
    write(out.join("manifest.jsonl"), manifest.to_jsonl())?;
    write(annotations_dir.join("train.json"), coco_json(&manifest, Split::Train))?;
    write(
        annotations_dir.join("validation.json"),
        coco_json(&manifest, Split::Validation),
    )?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;
    use image::RgbImage;

    fn background(w: u32, h: u32) -> UiScreenshot {
        UiScreenshot::new("bg", synthetic::ui_background(1, w, h), Domain::Mobile).unwrap()
    }

    fn template_64() -> IconTemplate {
        let icon = synthetic::icon_rgba(IconClass::Star, 0);
        let big = image::imageops::resize(&icon, 64, 64, image::imageops::FilterType::Nearest);
        IconTemplate::from_rgba("star_big", IconClass::Star, &big).unwrap()
    }

    #[test]
    fn same_seed_same_composite() {
        let bg = background(120, 200);
        let t = &synthetic::icon_templates()[0];
        let cfg = SynthConfig::default();
        let a = synthesize_screen(&bg, t, 42, &cfg).unwrap();
        let b = synthesize_screen(&bg, t, 42, &cfg).unwrap();
        assert_eq!(a, b);
        let c = synthesize_screen(&bg, t, 43, &cfg).unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn unit_scale_places_native_size_in_bounds() {
        let bg = UiScreenshot::new(
            "bg",
            RgbImage::from_pixel(1000, 2000, image::Rgb([240, 240, 240])),
            Domain::Web,
        )
        .unwrap();
        let cfg = SynthConfig {
            min_scale: 1.0,
            max_scale: 1.0,
            ..SynthConfig::default()
        };
        for seed in 0..20 {
            let (_, spec) = synthesize_screen(&bg, &template_64(), seed, &cfg).unwrap();
            assert_eq!((spec.placed_box.width(), spec.placed_box.height()), (64, 64));
            assert!(spec.placed_box.fits_within(1000, 2000));
            assert_eq!(spec.scale, 1.0);
        }
    }

    #[test]
    fn only_opaque_pixels_inside_box_change() {
        let bg = background(150, 240);
        let t = &synthetic::icon_templates()[4];
        let (composite, spec) = synthesize_screen(&bg, t, 7, &SynthConfig::default()).unwrap();
        let b = spec.placed_box;
        for (x, y, px) in composite.pixels().enumerate_pixels() {
            let inside = x >= b.left() && x < b.right() && y >= b.top() && y < b.bottom();
            if !inside {
                assert_eq!(px, bg.pixels().get_pixel(x, y));
            }
        }
        let scaled = t.resized(b.width(), b.height());
        for y in 0..b.height() {
            for x in 0..b.width() {
                let got = composite.pixels().get_pixel(b.left() + x, b.top() + y);
                if scaled.is_opaque(x, y) {
                    assert_eq!(got, scaled.rgb.get_pixel(x, y));
                } else {
                    assert_eq!(got, bg.pixels().get_pixel(b.left() + x, b.top() + y));
                }
            }
        }
    }

    #[test]
    fn unsatisfiable_fit_names_min_scale() {
        let bg = background(20, 20);
        let err = synthesize_screen(&bg, &template_64(), 1, &SynthConfig::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("min scale 0.5"), "{err}");
    }

    #[test]
    fn seeds_differ_per_pair() {
        assert_ne!(pair_seed(1, "a", "star_1"), pair_seed(1, "a", "star_2"));
        assert_ne!(pair_seed(1, "a", "star_1"), pair_seed(2, "a", "star_1"));
        assert_eq!(pair_seed(9, "bg", "ad_1"), pair_seed(9, "bg", "ad_1"));
    }
}
