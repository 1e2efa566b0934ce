//! Pixel helpers: luma conversion and a few drawing primitives used by the
//! overlay renderer and the procedural fixtures.

use image::{GenericImage, Rgb, RgbImage};

use crate::geometry::BoundingBox;

/// Integer luma, `round(0.299 R + 0.587 G + 0.114 B)`.
#[inline]
pub fn luma(rgb: [u8; 3]) -> u8 {
    let [r, g, b] = rgb.map(u32::from);
    ((299 * r + 587 * g + 114 * b + 500) / 1000) as u8
}

/// Grayscale copy of an RGB image as `f64` values, row-major.
#[derive(Clone, Debug)]
pub struct GrayPlane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl GrayPlane {
    pub fn from_rgb(img: &RgbImage) -> Self {
        GrayPlane {
            width: img.width() as usize,
            height: img.height() as usize,
            data: img.pixels().map(|p| f64::from(luma(p.0))).collect(),
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

pub fn fill_rect<I: GenericImage>(img: &mut I, bbox: BoundingBox, px: I::Pixel) {
    let Some(clipped) = bbox.clamp_to(img.width(), img.height()) else {
        return;
    };
    for y in clipped.top()..clipped.bottom() {
        for x in clipped.left()..clipped.right() {
            img.put_pixel(x, y, px);
        }
    }
}

/// Outlines `bbox` with a border `thickness` pixels wide, drawn inward.
pub fn stroke_rect<I: GenericImage>(img: &mut I, bbox: BoundingBox, thickness: u32, px: I::Pixel) {
    let t = thickness.max(1);
    let (l, top, w, h) = (bbox.left(), bbox.top(), bbox.width(), bbox.height());
    let edges = [
        BoundingBox::new(l, top, w, t.min(h)),
        BoundingBox::new(l, (bbox.bottom()).saturating_sub(t).max(top), w, t.min(h)),
        BoundingBox::new(l, top, t.min(w), h),
        BoundingBox::new((bbox.right()).saturating_sub(t).max(l), top, t.min(w), h),
    ];
    for edge in edges.into_iter().flatten() {
        fill_rect(img, edge, px);
    }
}

/// Sets every pixel whose centre satisfies `inside` to `px`.
pub fn fill_where<I, F>(img: &mut I, px: I::Pixel, inside: F)
where
    I: GenericImage,
    F: Fn(f64, f64) -> bool,
{
    for y in 0..img.height() {
        for x in 0..img.width() {
            if inside(f64::from(x) + 0.5, f64::from(y) + 0.5) {
                img.put_pixel(x, y, px);
            }
        }
    }
}

// 3x5 glyphs, one byte per row, bit 2 = leftmost column.
const GLYPH_W: u32 = 3;
const GLYPH_H: u32 = 5;

fn glyph(c: char) -> [u8; 5] {
    match c.to_ascii_uppercase() {
        'A' => [0b010, 0b101, 0b111, 0b101, 0b101],
        'B' => [0b110, 0b101, 0b110, 0b101, 0b110],
        'C' => [0b011, 0b100, 0b100, 0b100, 0b011],
        'D' => [0b110, 0b101, 0b101, 0b101, 0b110],
        'E' => [0b111, 0b100, 0b110, 0b100, 0b111],
        'F' => [0b111, 0b100, 0b110, 0b100, 0b100],
        'G' => [0b011, 0b100, 0b101, 0b101, 0b011],
        'H' => [0b101, 0b101, 0b111, 0b101, 0b101],
        'I' => [0b111, 0b010, 0b010, 0b010, 0b111],
        'J' => [0b001, 0b001, 0b001, 0b101, 0b010],
        'K' => [0b101, 0b101, 0b110, 0b101, 0b101],
        'L' => [0b100, 0b100, 0b100, 0b100, 0b111],
        'M' => [0b101, 0b111, 0b111, 0b101, 0b101],
        'N' => [0b110, 0b101, 0b101, 0b101, 0b101],
        'O' => [0b010, 0b101, 0b101, 0b101, 0b010],
        'P' => [0b110, 0b101, 0b110, 0b100, 0b100],
        'Q' => [0b010, 0b101, 0b101, 0b110, 0b011],
        'R' => [0b110, 0b101, 0b110, 0b101, 0b101],
        'S' => [0b011, 0b100, 0b010, 0b001, 0b110],
        'T' => [0b111, 0b010, 0b010, 0b010, 0b010],
        'U' => [0b101, 0b101, 0b101, 0b101, 0b111],
        'V' => [0b101, 0b101, 0b101, 0b101, 0b010],
        'W' => [0b101, 0b101, 0b111, 0b111, 0b101],
        'X' => [0b101, 0b101, 0b010, 0b101, 0b101],
        'Y' => [0b101, 0b101, 0b010, 0b010, 0b010],
        'Z' => [0b111, 0b001, 0b010, 0b100, 0b111],
        '0' => [0b111, 0b101, 0b101, 0b101, 0b111],
        '1' => [0b010, 0b110, 0b010, 0b010, 0b111],
        '2' => [0b110, 0b001, 0b010, 0b100, 0b111],
        '3' => [0b110, 0b001, 0b010, 0b001, 0b110],
        '4' => [0b101, 0b101, 0b111, 0b001, 0b001],
        '5' => [0b111, 0b100, 0b110, 0b001, 0b110],
        '6' => [0b011, 0b100, 0b111, 0b101, 0b111],
        '7' => [0b111, 0b001, 0b010, 0b010, 0b010],
        '8' => [0b111, 0b101, 0b111, 0b101, 0b111],
        '9' => [0b111, 0b101, 0b111, 0b001, 0b110],
        '.' => [0b000, 0b000, 0b000, 0b000, 0b010],
        '-' => [0b000, 0b000, 0b111, 0b000, 0b000],
        '_' => [0b000, 0b000, 0b000, 0b000, 0b111],
        ':' => [0b000, 0b010, 0b000, 0b010, 0b000],
        '/' => [0b001, 0b001, 0b010, 0b100, 0b100],
        _ => [0; 5],
    }
}

/// Width in pixels of `text` rendered by [`draw_text`] at `scale`.
pub fn text_width(text: &str, scale: u32) -> u32 {
    let n = text.chars().count() as u32;
    if n == 0 {
        0
    } else {
        (n * (GLYPH_W + 1) - 1) * scale
    }
}

pub fn text_height(scale: u32) -> u32 {
    GLYPH_H * scale
}

/// Draws `text` with its top-left corner at (`x`, `y`), clipped to the image.
pub fn draw_text<I: GenericImage>(img: &mut I, x: i64, y: i64, scale: u32, text: &str, px: I::Pixel) {
    let scale = scale.max(1);
    let (w, h) = (i64::from(img.width()), i64::from(img.height()));
    for (i, c) in text.chars().enumerate() {
        let gx = x + i as i64 * i64::from((GLYPH_W + 1) * scale);
        for (row, bits) in glyph(c).iter().enumerate() {
            for col in 0..GLYPH_W {
                if bits & (1 << (GLYPH_W - 1 - col)) == 0 {
                    continue;
                }
                for dy in 0..scale {
                    for dx in 0..scale {
                        let px_x = gx + i64::from(col * scale + dx);
                        let px_y = y + row as i64 * i64::from(scale) + i64::from(dy);
                        if (0..w).contains(&px_x) && (0..h).contains(&px_y) {
                            img.put_pixel(px_x as u32, px_y as u32, px);
                        }
                    }
                }
            }
        }
    }
}

pub fn rgb(r: u8, g: u8, b: u8) -> Rgb<u8> {
    Rgb([r, g, b])
}
