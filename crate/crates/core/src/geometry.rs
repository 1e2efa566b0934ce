//! Integer pixel boxes.
//!
//! Origin is the top-left corner. A box covers the half-open cell range
//! `left <= x < left + width`, `top <= y < top + height`, so areas and
//! intersections agree exactly with counting covered pixel cells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u32; 4]", into = "[u32; 4]")]
pub struct BoundingBox {
    left: u32,
    top: u32,
    width: u32,
    height: u32,
}

impl BoundingBox {
    /// Builds a box, rejecting zero extents and edges that overflow `u32`.
    pub fn new(left: u32, top: u32, width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidBox(format!(
                "zero-area box [{left}, {top}, {width}, {height}]"
            )));
        }
        if left.checked_add(width).is_none() || top.checked_add(height).is_none() {
            return Err(Error::InvalidBox(format!(
                "box [{left}, {top}, {width}, {height}] overflows pixel range"
            )));
        }
        Ok(BoundingBox {
            left,
            top,
            width,
            height,
        })
    }

    /// Builds a box from its edges (`right`/`bottom` exclusive).
    pub fn from_edges(left: u32, top: u32, right: u32, bottom: u32) -> Result<Self> {
        if right <= left || bottom <= top {
            return Err(Error::InvalidBox(format!(
                "empty edge range l={left} t={top} r={right} b={bottom}"
            )));
        }
        BoundingBox::new(left, top, right - left, bottom - top)
    }

    pub fn left(&self) -> u32 {
        self.left
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn right(&self) -> u32 {
        self.left + self.width
    }

    pub fn bottom(&self) -> u32 {
        self.top + self.height
    }

    pub fn area(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }

    pub fn intersection(&self, other: &BoundingBox) -> Option<BoundingBox> {
        let left = self.left.max(other.left);
        let top = self.top.max(other.top);
        let right = self.right().min(other.right());
        let bottom = self.bottom().min(other.bottom());
        BoundingBox::from_edges(left, top, right, bottom).ok()
    }

    pub fn intersection_area(&self, other: &BoundingBox) -> u64 {
        self.intersection(other).map_or(0, |b| b.area())
    }

    pub fn union_area(&self, other: &BoundingBox) -> u64 {
        self.area() + other.area() - self.intersection_area(other)
    }

    /// Intersection over union.
    pub fn strict_iou(&self, other: &BoundingBox) -> f64 {
        let inter = self.intersection_area(other);
        if inter == 0 {
            return 0.0;
        }
        inter as f64 / self.union_area(other) as f64
    }

    /// True when `inner` lies inside `self`; shared edges count as inside.
    pub fn contains(&self, inner: &BoundingBox) -> bool {
        inner.left >= self.left
            && inner.top >= self.top
            && inner.right() <= self.right()
            && inner.bottom() <= self.bottom()
    }

    /// IoU variant that scores 1.0 whenever `self` (the prediction) lies
    /// entirely within `truth`.
    pub fn contained_iou(&self, truth: &BoundingBox) -> f64 {
        if truth.contains(self) {
            1.0
        } else {
            self.strict_iou(truth)
        }
    }

    /// Clips the box to a `width` x `height` canvas. `None` if nothing is left.
    pub fn clamp_to(&self, width: u32, height: u32) -> Option<BoundingBox> {
        BoundingBox::from_edges(
            self.left.min(width),
            self.top.min(height),
            self.right().min(width),
            self.bottom().min(height),
        )
        .ok()
    }

    /// Clips a signed `[left, top, width, height]` rectangle to a canvas.
    ///
    /// Returns `Ok(None)` when the rectangle lies fully outside, and an error
    /// when it is degenerate to begin with.
    pub fn clamp_signed(raw: [i64; 4], width: u32, height: u32) -> Result<Option<BoundingBox>> {
        let [l, t, w, h] = raw;
        if w <= 0 || h <= 0 {
            return Err(Error::InvalidBox(format!(
                "non-positive extent in [{l}, {t}, {w}, {h}]"
            )));
        }
        let clip = |v: i64, hi: u32| v.clamp(0, i64::from(hi)) as u32;
        let (left, right) = (clip(l, width), clip(l.saturating_add(w), width));
        let (top, bottom) = (clip(t, height), clip(t.saturating_add(h), height));
        Ok(BoundingBox::from_edges(left, top, right, bottom).ok())
    }

    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.right() <= width && self.bottom() <= height
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Option<BoundingBox> {
        let left = u32::try_from(i64::from(self.left) + dx).ok()?;
        let top = u32::try_from(i64::from(self.top) + dy).ok()?;
        BoundingBox::new(left, top, self.width, self.height).ok()
    }

    pub fn to_array(&self) -> [u32; 4] {
        [self.left, self.top, self.width, self.height]
    }
}

impl TryFrom<[u32; 4]> for BoundingBox {
    type Error = Error;

    fn try_from([l, t, w, h]: [u32; 4]) -> Result<Self> {
        BoundingBox::new(l, t, w, h)
    }
}

impl From<BoundingBox> for [u32; 4] {
    fn from(b: BoundingBox) -> Self {
        b.to_array()
    }
}

impl std::fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.left, self.top, self.width, self.height)
    }
}
