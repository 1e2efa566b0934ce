use std::path::Path;

use image::{RgbImage, RgbaImage};

use super::IconClass;
use crate::error::{Error, Result};

/// An icon bitmap with a binary opacity mask.
#[derive(Clone, Debug, PartialEq)]
pub struct IconTemplate {
    /// Variant id, the template file stem (e.g. `star_2`).
    pub name: String,
    pub icon_class: IconClass,
    rgb: RgbImage,
    mask: Vec<bool>,
}

/// A template resampled to a concrete pixel size.
#[derive(Clone, Debug)]
pub struct ScaledTemplate {
    pub rgb: RgbImage,
    pub mask: Vec<bool>,
}

impl ScaledTemplate {
    pub fn width(&self) -> u32 {
        self.rgb.width()
    }

    pub fn height(&self) -> u32 {
        self.rgb.height()
    }

    pub fn is_opaque(&self, x: u32, y: u32) -> bool {
        self.mask[(y * self.rgb.width() + x) as usize]
    }
}

impl IconTemplate {
    /// Alpha >= 128 counts as opaque.
    pub fn from_rgba(name: impl Into<String>, icon_class: IconClass, rgba: &RgbaImage) -> Result<Self> {
        let name = name.into();
        let mask: Vec<bool> = rgba.pixels().map(|p| p.0[3] >= 128).collect();
        if !mask.iter().any(|&m| m) {
            return Err(Error::Template {
                name,
                message: "mask has no opaque pixel".into(),
            });
        }
        let rgb = RgbImage::from_fn(rgba.width(), rgba.height(), |x, y| {
            let [r, g, b, _] = rgba.get_pixel(x, y).0;
            image::Rgb([r, g, b])
        });
        Ok(IconTemplate {
            name,
            icon_class,
            rgb,
            mask,
        })
    }

    /// Loads `<class>_<variant>.png`; the alpha channel becomes the mask.
    pub fn load(path: &Path) -> Result<Self> {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let icon_class = IconClass::from_template_stem(&stem).ok_or_else(|| Error::Template {
            name: stem.clone(),
            message: "file name does not start with a known icon class".into(),
        })?;
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
        IconTemplate::from_rgba(stem, icon_class, &img.to_rgba8())
    }

    pub fn native_width(&self) -> u32 {
        self.rgb.width()
    }

    pub fn native_height(&self) -> u32 {
        self.rgb.height()
    }

    pub fn rgb(&self) -> &RgbImage {
        &self.rgb
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Pixel size of the template at `scale`, at least 1x1.
    pub fn size_at(&self, scale: f64) -> (u32, u32) {
        let side = |native: u32| ((f64::from(native) * scale).round() as u32).max(1);
        (side(self.native_width()), side(self.native_height()))
    }

    pub fn scaled(&self, scale: f64) -> ScaledTemplate {
        let (w, h) = self.size_at(scale);
        self.resized(w, h)
    }

    /// Nearest-neighbour resample. Compositing and matching share this so an
    /// exact-size match reproduces the planted pixels bit for bit.
    pub fn resized(&self, width: u32, height: u32) -> ScaledTemplate {
        let (nw, nh) = (self.native_width(), self.native_height());
        let src = |dst: u32, dst_len: u32, src_len: u32| {
            let pos = ((u64::from(dst) * 2 + 1) * u64::from(src_len)) / (u64::from(dst_len) * 2);
            (pos as u32).min(src_len - 1)
        };
        let mut mask = Vec::with_capacity((width * height) as usize);
        let rgb = RgbImage::from_fn(width, height, |x, y| {
            let (sx, sy) = (src(x, width, nw), src(y, height, nh));
            *self.rgb.get_pixel(sx, sy)
        });
        for y in 0..height {
            for x in 0..width {
                let (sx, sy) = (src(x, width, nw), src(y, height, nh));
                mask.push(self.mask[(sy * nw + sx) as usize]);
            }
        }
        ScaledTemplate { rgb, mask }
    }
}

/// Loads every `*.png` in `dir` in file-name order. Unusable files are
/// reported in the returned diagnostics instead of failing the load.
pub fn load_template_dir(dir: &Path) -> Result<(Vec<IconTemplate>, Vec<String>)> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("png")))
        .collect();
    paths.sort();
    let mut templates = Vec::new();
    let mut diagnostics = Vec::new();
    for path in paths {
        match IconTemplate::load(&path) {
            Ok(t) => templates.push(t),
            Err(e) => diagnostics.push(format!("skipping template: {e}")),
        }
    }
    Ok((templates, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn checker(w: u32, h: u32) -> RgbaImage {
        RgbaImage::from_fn(w, h, |x, y| {
            let v = if (x + y) % 2 == 0 { 255 } else { 0 };
            image::Rgba([v, v, v, if x == 0 { 0 } else { 255 }])
        })
    }

    #[test]
    fn unit_scale_is_identity() {
        let t = IconTemplate::from_rgba("star_1", IconClass::Star, &checker(5, 4)).unwrap();
        let s = t.scaled(1.0);
        assert_eq!(&s.rgb, t.rgb());
        assert_eq!(s.mask, t.mask());
        assert!(!s.is_opaque(0, 0));
        assert!(s.is_opaque(1, 0));
    }

    #[test]
    fn doubling_repeats_pixels() {
        let t = IconTemplate::from_rgba("star_1", IconClass::Star, &checker(3, 3)).unwrap();
        let s = t.scaled(2.0);
        assert_eq!((s.width(), s.height()), (6, 6));
        for y in 0..6 {
            for x in 0..6 {
                assert_eq!(s.rgb.get_pixel(x, y), t.rgb().get_pixel(x / 2, y / 2));
            }
        }
    }

    #[test]
    fn rejects_fully_transparent_template() {
        let img = RgbaImage::new(4, 4);
        assert!(IconTemplate::from_rgba("ad_1", IconClass::Ad, &img).is_err());
    }

    #[test]
    fn loads_directory_with_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        checker(6, 6).save(dir.path().join("like_a.png")).unwrap();
        checker(6, 6).save(dir.path().join("banner_a.png")).unwrap();
        std::fs::write(dir.path().join("notes.txt"), "x").unwrap();
        let (templates, diags) = load_template_dir(dir.path()).unwrap();
        assert_eq!(templates.len(), 1);
        assert_eq!(templates[0].icon_class, IconClass::Like);
        assert_eq!(templates[0].name, "like_a");
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("banner_a"));
    }
}
