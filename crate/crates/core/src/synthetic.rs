//! Procedurally drawn icon templates and UI-like backgrounds.
//!
//! These stand in for real icon sets and app screenshots in tests, benches and
//! demos. Everything is a pure function of its arguments.

use std::f64::consts::PI;
use std::path::Path;

use image::{Rgb, RgbImage, Rgba, RgbaImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::icons::{IconClass, IconTemplate};
use crate::raster::{draw_text, fill_rect, fill_where, stroke_rect, text_width};

const CLEAR: Rgba<u8> = Rgba([0, 0, 0, 0]);

fn rgba(r: u8, g: u8, b: u8) -> Rgba<u8> {
    Rgba([r, g, b, 255])
}

fn in_polygon(px: f64, py: f64, poly: &[(f64, f64)]) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn star_polygon(cx: f64, cy: f64, outer: f64, inner: f64) -> Vec<(f64, f64)> {
    (0..10)
        .map(|i| {
            let r = if i % 2 == 0 { outer } else { inner };
            let a = -PI / 2.0 + f64::from(i) * PI / 5.0;
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

fn rounded_rect(x: f64, y: f64, w: f64, h: f64, r: f64) -> impl Fn(f64, f64) -> bool {
    move |px, py| {
        if px < x || py < y || px > x + w || py > y + h {
            return false;
        }
        let cx = px.clamp(x + r, x + w - r);
        let cy = py.clamp(y + r, y + h - r);
        (px - cx).powi(2) + (py - cy).powi(2) <= r * r
    }
}

fn star(size: u32, fill: Rgba<u8>, edge: Rgba<u8>) -> RgbaImage {
    let mut img = RgbaImage::from_pixel(size, size, CLEAR);
    let c = f64::from(size) / 2.0;
    let outer = star_polygon(c, c + 1.0, c - 0.5, c * 0.42);
    let inner = star_polygon(c, c + 1.0, c - 4.0, c * 0.42 - 2.0);
    fill_where(&mut img, edge, |x, y| in_polygon(x, y, &outer));
    fill_where(&mut img, fill, |x, y| in_polygon(x, y, &inner));
    fill_where(&mut img, rgba(255, 255, 255), |x, y| {
        (x - c + 3.0).powi(2) + (y - c + 2.0).powi(2) < 4.0
    });
    img
}

fn thumb(size: u32, fill: Rgba<u8>, edge: Rgba<u8>, backdrop: Option<Rgba<u8>>) -> RgbaImage {
    let mut img = RgbaImage::from_pixel(size, size, CLEAR);
    let s = f64::from(size) / 32.0;
    if let Some(bg) = backdrop {
        fill_where(
            &mut img,
            bg,
            rounded_rect(0.0, 0.0, f64::from(size), f64::from(size), 6.0 * s),
        );
    }
    let shape = move |x: f64, y: f64, grow: f64| {
        let palm = x >= (12.0 - grow) * s && x <= (27.0 + grow) * s && y >= (13.0 - grow) * s && y <= (28.0 + grow) * s;
        let cuff = x >= (4.0 - grow) * s && x <= (10.0 + grow) * s && y >= (14.0 - grow) * s && y <= (28.0 + grow) * s;
        let tip = ((x - 17.0 * s) / ((5.0 + grow) * s)).powi(2) + ((y - 10.0 * s) / ((7.0 + grow) * s)).powi(2) <= 1.0;
        palm || cuff || tip
    };
    fill_where(&mut img, edge, |x, y| shape(x, y, 1.5));
    fill_where(&mut img, fill, |x, y| shape(x, y, 0.0));
    // finger creases
    for k in 0..3 {
        let yk = (17.0 + 4.0 * f64::from(k)) * s;
        fill_where(&mut img, edge, |x, y| {
            x >= 19.0 * s && x <= 27.0 * s && (y - yk).abs() < 0.6 * s.max(1.0)
        });
    }
    img
}

fn flip_vertical(img: &RgbaImage) -> RgbaImage {
    image::imageops::flip_vertical(img)
}

fn toggle(w: u32, h: u32, track: Rgba<u8>, knob: Rgba<u8>, ring: Rgba<u8>) -> RgbaImage {
    let mut img = RgbaImage::from_pixel(w, h, CLEAR);
    let (wf, hf) = (f64::from(w), f64::from(h));
    fill_where(&mut img, track, rounded_rect(0.0, 0.0, wf, hf, hf / 2.0));
    let (kx, ky, kr) = (wf - hf / 2.0, hf / 2.0, hf / 2.0 - 2.0);
    fill_where(&mut img, ring, |x, y| (x - kx).powi(2) + (y - ky).powi(2) <= kr * kr);
    fill_where(&mut img, knob, |x, y| {
        (x - kx).powi(2) + (y - ky).powi(2) <= (kr - 1.5).powi(2)
    });
    img
}

fn ad_badge(w: u32, h: u32, bg: Rgba<u8>, fg: Rgba<u8>, outlined: bool) -> RgbaImage {
    let mut img = RgbaImage::from_pixel(w, h, CLEAR);
    fill_where(&mut img, bg, rounded_rect(0.0, 0.0, f64::from(w), f64::from(h), 3.0));
    if outlined {
        stroke_rect(&mut img, BoundingBox::new(1, 1, w - 2, h - 2).unwrap(), 2, fg);
    }
    let scale = 2;
    let tw = text_width("AD", scale);
    draw_text(&mut img, i64::from((w - tw) / 2), i64::from(h / 2) - 5, scale, "AD", fg);
    img
}

fn spinner(size: u32, dots: bool) -> RgbaImage {
    let mut img = RgbaImage::from_pixel(size, size, CLEAR);
    let c = f64::from(size) / 2.0;
    if dots {
        for k in 0..8 {
            let a = f64::from(k) * PI / 4.0;
            let (dx, dy) = (c + (c - 5.0) * a.cos(), c + (c - 5.0) * a.sin());
            let v = (30 + k * 28) as u8;
            fill_where(&mut img, rgba(v, v, 255 - v / 2), |x, y| {
                (x - dx).powi(2) + (y - dy).powi(2) <= 12.0
            });
        }
    } else {
        for y in 0..size {
            for x in 0..size {
                let (px, py) = (f64::from(x) + 0.5 - c, f64::from(y) + 0.5 - c);
                let r = px.hypot(py);
                if r <= c - 1.0 && r >= c - 7.0 {
                    let t = (py.atan2(px) + PI) / (2.0 * PI);
                    let v = (40.0 + 200.0 * t) as u8;
                    img.put_pixel(x, y, rgba(v, 60, 255 - v));
                }
            }
        }
        fill_where(&mut img, rgba(250, 250, 250), |x, y| {
            (x - c).powi(2) + (y - c).powi(2) <= 9.0
        });
    }
    img
}

/// Draws variant `variant` (0 or 1) of an icon class as RGBA.
pub fn icon_rgba(class: IconClass, variant: usize) -> RgbaImage {
    match (class, variant % 2) {
        (IconClass::Star, 0) => star(32, rgba(255, 196, 0), rgba(170, 90, 0)),
        (IconClass::Star, _) => star(28, rgba(220, 220, 220), rgba(90, 90, 90)),
        (IconClass::Like, 0) => thumb(32, rgba(250, 250, 250), rgba(20, 60, 140), Some(rgba(40, 110, 230))),
        (IconClass::Like, _) => thumb(30, rgba(150, 200, 255), rgba(10, 40, 110), None),
        (IconClass::Dislike, 0) => flip_vertical(&thumb(
            32,
            rgba(250, 250, 250),
            rgba(120, 20, 20),
            Some(rgba(220, 60, 50)),
        )),
        (IconClass::Dislike, _) => flip_vertical(&thumb(30, rgba(255, 170, 160), rgba(110, 10, 10), None)),
        (IconClass::ToggleOn, 0) => toggle(44, 22, rgba(40, 180, 90), rgba(255, 255, 255), rgba(20, 120, 60)),
        (IconClass::ToggleOn, _) => toggle(40, 20, rgba(30, 120, 240), rgba(245, 245, 245), rgba(120, 120, 120)),
        (IconClass::Ad, 0) => ad_badge(26, 16, rgba(250, 200, 40), rgba(40, 40, 40), false),
        (IconClass::Ad, _) => ad_badge(30, 18, rgba(255, 255, 255), rgba(20, 140, 60), true),
        (IconClass::AdLoader, 0) => spinner(32, true),
        (IconClass::AdLoader, _) => spinner(30, false),
    }
}

/// Two variants per class, named `<class>_<n>`.
pub fn icon_templates() -> Vec<IconTemplate> {
    IconClass::ALL
        .into_iter()
        .flat_map(|class| {
            (0..2).map(move |v| {
                IconTemplate::from_rgba(format!("{}_{}", class.name(), v + 1), class, &icon_rgba(class, v))
                    .expect("procedural icons have opaque pixels")
            })
        })
        .collect()
}

/// Writes the procedural templates as `<class>_<n>.png` into `dir`.
pub fn write_icon_templates(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for class in IconClass::ALL {
        for v in 0..2 {
            let path = dir.join(format!("{}_{}.png", class.name(), v + 1));
            icon_rgba(class, v)
                .save(&path)
                .map_err(|source| Error::Image { path, source })?;
        }
    }
    Ok(())
}

/// A mobile-app-like screen: status bar, app bar, cards with text lines
/// and thumbnails.
pub fn ui_background(seed: u64, width: u32, height: u32) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dark = rng.random_bool(0.15);
    let base: u8 = if dark {
        rng.random_range(18..40)
    } else {
        rng.random_range(232..250)
    };
    let mut img = RgbImage::from_pixel(width, height, Rgb([base, base, base.saturating_add(3)]));
    let rect = |l: u32, t: u32, w: u32, h: u32| BoundingBox::new(l, t, w.max(1), h.max(1)).unwrap();

    let status_h = (height / 24).max(2);
    fill_rect(&mut img, rect(0, 0, width, status_h), Rgb([20, 20, 20]));
    let bar_h = (height / 11).max(4);
    let accent = Rgb([
        rng.random_range(20..200),
        rng.random_range(20..200),
        rng.random_range(60..230),
    ]);
    fill_rect(&mut img, rect(0, status_h, width, bar_h), accent);
    fill_rect(
        &mut img,
        rect(width / 12, status_h + bar_h / 3, width / 3, (bar_h / 4).max(2)),
        Rgb([245, 245, 245]),
    );

    let text = if dark { Rgb([200, 200, 200]) } else { Rgb([60, 60, 60]) };
    let card = if dark { Rgb([45, 45, 50]) } else { Rgb([255, 255, 255]) };
    let margin = (width / 24).max(2);
    let mut y = status_h + bar_h + margin;
    while y + 20 < height {
        let ch = rng.random_range(height / 10..height / 5).max(12);
        let ch = ch.min(height - y - 1);
        fill_rect(&mut img, rect(margin, y, width - 2 * margin, ch), card);
        let thumb = ch.saturating_sub(8).min(width / 5).max(4);
        let thumb_colour = Rgb([
            rng.random_range(0..255),
            rng.random_range(0..255),
            rng.random_range(0..255),
        ]);
        fill_rect(&mut img, rect(margin + 4, y + 4, thumb, thumb), thumb_colour);
        let tx = margin + thumb + 10;
        let mut ly = y + 5;
        while ly + 4 < y + ch - 2 {
            let max_len = width.saturating_sub(tx + margin + 4).max(8);
            let len = rng.random_range(max_len / 3..=max_len);
            fill_rect(&mut img, rect(tx, ly, len, 3), text);
            ly += rng.random_range(7..11);
        }
        y += ch + margin;
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_cover_every_class_twice() {
        let templates = icon_templates();
        assert_eq!(templates.len(), 12);
        for class in IconClass::ALL {
            assert_eq!(templates.iter().filter(|t| t.icon_class == class).count(), 2);
        }
    }

    #[test]
    fn backgrounds_are_deterministic() {
        assert_eq!(ui_background(3, 90, 160), ui_background(3, 90, 160));
        assert_ne!(ui_background(3, 90, 160), ui_background(4, 90, 160));
    }

    #[test]
    fn written_templates_load_back() {
        let dir = tempfile::tempdir().unwrap();
        write_icon_templates(dir.path()).unwrap();
        let (loaded, diags) = crate::icons::load_template_dir(dir.path()).unwrap();
        assert!(diags.is_empty());
        assert_eq!(loaded.len(), 12);
        let mut expected = icon_templates();
        expected.sort_by(|a, b| a.name.cmp(&b.name));
        assert_eq!(loaded, expected);
    }
}
