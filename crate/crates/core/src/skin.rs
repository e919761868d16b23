//! HSV skin-colour thresholding.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::{rgb_to_hsv, BinarySilhouette, HsvPixel, RgbImage};

#[derive(Debug, Error, PartialEq)]
pub enum SkinError {
    #[error("{channel} bounds are inverted: [{lo}, {hi}]")]
    Inverted { channel: &'static str, lo: f64, hi: f64 },
    #[error("{channel} bound {value} is outside {range}")]
    OutOfRange { channel: &'static str, value: f64, range: &'static str },
}

/// Inclusive skin-colour box in HSV space.
///
/// The hue interval wraps through 0° when `hue_lo > hue_hi`, e.g. `[340, 20]`.
/// Setting the value bounds to `[0, 1]` ignores brightness entirely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkinBounds {
    pub hue_lo: f64,
    pub hue_hi: f64,
    pub sat_lo: f64,
    pub sat_hi: f64,
    pub value_lo: f64,
    pub value_hi: f64,
}

impl Default for SkinBounds {
    fn default() -> Self {
        Self { hue_lo: 0.0, hue_hi: 50.0, sat_lo: 0.20, sat_hi: 0.68, value_lo: 0.30, value_hi: 1.0 }
    }
}

impl SkinBounds {
    pub fn validate(&self) -> Result<(), SkinError> {
        for (channel, v) in [("hue", self.hue_lo), ("hue", self.hue_hi)] {
            if !(0.0..=360.0).contains(&v) {
                return Err(SkinError::OutOfRange { channel, value: v, range: "[0, 360]" });
            }
        }
        for (channel, lo, hi) in [("saturation", self.sat_lo, self.sat_hi), ("value", self.value_lo, self.value_hi)] {
            for v in [lo, hi] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(SkinError::OutOfRange { channel, value: v, range: "[0, 1]" });
                }
            }
            if lo > hi {
                return Err(SkinError::Inverted { channel, lo, hi });
            }
        }
        Ok(())
    }

    pub fn contains(&self, hsv: HsvPixel) -> bool {
        let hue_ok = if self.hue_lo <= self.hue_hi {
            hsv.hue >= self.hue_lo && hsv.hue <= self.hue_hi
        } else {
            hsv.hue >= self.hue_lo || hsv.hue <= self.hue_hi
        };
        hue_ok
            && hsv.saturation >= self.sat_lo
            && hsv.saturation <= self.sat_hi
            && hsv.value >= self.value_lo
            && hsv.value <= self.value_hi
    }
}

/// Marks every pixel whose HSV colour lies inside `bounds`.
pub fn segment_skin(image: &RgbImage, bounds: &SkinBounds) -> BinarySilhouette {
    let bits = image.pixels().iter().map(|&rgb| u8::from(bounds.contains(rgb_to_hsv(rgb)))).collect();
    BinarySilhouette::from_bits(image.width(), image.height(), bits).expect("RgbImage guarantees nonzero dimensions")
}
