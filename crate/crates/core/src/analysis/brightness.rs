//! Two-bin grayscale histogram classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::model::UiScreenshot;
use crate::raster::luma;

pub const DEFAULT_BRIGHTNESS_SHARE: f64 = 0.65;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrightnessClass {
    Darker,
    Brighter,
    Normal,
}

impl BrightnessClass {
    /// Darker and Brighter are opposite poles; Normal opposes nothing.
    pub fn is_opposite(self, other: BrightnessClass) -> bool {
        matches!(
            (self, other),
            (BrightnessClass::Darker, BrightnessClass::Brighter) | (BrightnessClass::Brighter, BrightnessClass::Darker)
        )
    }
}

/// Pixels in `[0, 127]` versus `[128, 255]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    pub low: u64,
    pub high: u64,
}

impl Histogram {
    pub fn from_lumas(values: impl IntoIterator<Item = u8>) -> Histogram {
        let mut h = Histogram::default();
        for v in values {
            if v < 128 {
                h.low += 1;
            } else {
                h.high += 1;
            }
        }
        h
    }

    /// A bin wins when it holds at least `share` of the pixels.
    pub fn classify(&self, share: f64) -> BrightnessClass {
        let total = (self.low + self.high) as f64;
        if total == 0.0 {
            return BrightnessClass::Normal;
        }
        if self.low as f64 / total >= share {
            BrightnessClass::Darker
        } else if self.high as f64 / total >= share {
            BrightnessClass::Brighter
        } else {
            BrightnessClass::Normal
        }
    }
}

pub fn region_histogram(screen: &UiScreenshot, region: BoundingBox) -> Result<Histogram> {
    if !region.fits_within(screen.width(), screen.height()) {
        return Err(Error::InvalidBox(format!(
            "region {region} exceeds the {}x{} screen",
            screen.width(),
            screen.height()
        )));
    }
    let px = screen.pixels();
    Ok(Histogram::from_lumas((region.top()..region.bottom()).flat_map(|y| {
        (region.left()..region.right()).map(move |x| luma(px.get_pixel(x, y).0))
    })))
}

/// Classifies a region with the default 65% share.
pub fn classify_brightness(screen: &UiScreenshot, region: BoundingBox) -> Result<BrightnessClass> {
    classify_brightness_with(screen, region, DEFAULT_BRIGHTNESS_SHARE)
}

pub fn classify_brightness_with(screen: &UiScreenshot, region: BoundingBox, share: f64) -> Result<BrightnessClass> {
    Ok(region_histogram(screen, region)?.classify(share))
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgb, RgbImage};
    use proptest::prelude::*;

    fn strip(values: &[u8]) -> UiScreenshot {
        let img = RgbImage::from_fn(values.len() as u32, 1, |x, _| {
            let v = values[x as usize];
            Rgb([v, v, v])
        });
        UiScreenshot::new("t", img, Default::default()).unwrap()
    }

    fn classify_all(values: &[u8]) -> BrightnessClass {
        let s = strip(values);
        classify_brightness(&s, s.bounds()).unwrap()
    }

    #[test]
    fn solid_regions() {
        assert_eq!(classify_all(&[0; 16]), BrightnessClass::Darker);
        assert_eq!(classify_all(&[255; 16]), BrightnessClass::Brighter);
        let half: Vec<u8> = (0..16).map(|i| if i % 2 == 0 { 0 } else { 255 }).collect();
        assert_eq!(classify_all(&half), BrightnessClass::Normal);
    }

    #[test]
    fn share_boundary_is_inclusive() {
        for (dark, want) in [
            (649, BrightnessClass::Normal),
            (650, BrightnessClass::Darker),
            (651, BrightnessClass::Darker),
        ] {
            let values: Vec<u8> = (0..1000).map(|i| if i < dark { 127 } else { 128 }).collect();
            assert_eq!(classify_all(&values), want, "{dark}");
        }
    }

    #[test]
    fn region_outside_screen_is_an_error() {
        let s = strip(&[0; 4]);
        assert!(classify_brightness(&s, BoundingBox::new(2, 0, 3, 1).unwrap()).is_err());
    }

    #[test]
    fn only_darker_and_brighter_oppose() {
        use BrightnessClass::*;
        assert!(Darker.is_opposite(Brighter) && Brighter.is_opposite(Darker));
        assert!(!Normal.is_opposite(Darker) && !Darker.is_opposite(Darker));
    }

    fn boundary_free() -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(prop_oneof![0u8..=120, 135u8..=255], 1..200)
    }

    proptest! {
        #[test]
        fn permutation_invariant(values in boundary_free(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = values.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(classify_all(&values), classify_all(&shuffled));
        }

        #[test]
        fn inversion_swaps_poles(values in boundary_free()) {
            let inverted: Vec<u8> = values.iter().map(|v| 255 - v).collect();
            let want = match classify_all(&values) {
                BrightnessClass::Darker => BrightnessClass::Brighter,
                BrightnessClass::Brighter => BrightnessClass::Darker,
                BrightnessClass::Normal => BrightnessClass::Normal,
            };
            prop_assert_eq!(classify_all(&inverted), want);
        }
    }
}
