//! Pixel buffers, RGB/HSV conversion and mask primitives.
//!
//! Coordinates are `(row, col)` with rows growing downward and columns growing
//! rightward. Angles are measured counter-clockwise from the `+col` axis as seen
//! on screen, so "up" in the image is 90°.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("buffer holds {actual} pixels, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
}

/// An integer pixel coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Point {
    pub row: i32,
    pub col: i32,
}

impl Point {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    /// Nearest pixel to a real-valued `(row, col)` position.
    pub fn round_from(row: f64, col: f64) -> Self {
        Self::new(row.round() as i32, col.round() as i32)
    }

    pub fn distance(self, other: Point) -> f64 {
        let dr = f64::from(self.row - other.row);
        let dc = f64::from(self.col - other.col);
        dr.hypot(dc)
    }

    /// Direction from `self` to `other` in degrees, `[0, 360)`.
    pub fn direction_to(self, other: Point) -> f64 {
        direction_deg(f64::from(other.row - self.row), f64::from(other.col - self.col))
    }

    pub fn translated(self, drow: i32, dcol: i32) -> Self {
        Self::new(self.row + drow, self.col + dcol)
    }
}

/// Screen-orientation angle of the displacement `(drow, dcol)`, in `[0, 360)`.
pub fn direction_deg(drow: f64, dcol: f64) -> f64 {
    normalize_deg((-drow).atan2(dcol).to_degrees())
}

pub fn normalize_deg(angle: f64) -> f64 {
    let a = angle.rem_euclid(360.0);
    // rem_euclid can return exactly 360.0 for tiny negative inputs
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}

/// Inclusive axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub min_row: i32,
    pub min_col: i32,
    pub max_row: i32,
    pub max_col: i32,
}

impl BBox {
    pub const fn new(min_row: i32, min_col: i32, max_row: i32, max_col: i32) -> Self {
        Self { min_row, min_col, max_row, max_col }
    }

    pub fn from_point(p: Point) -> Self {
        Self::new(p.row, p.col, p.row, p.col)
    }

    pub fn height(&self) -> i32 {
        (self.max_row - self.min_row + 1).max(0)
    }

    pub fn width(&self) -> i32 {
        (self.max_col - self.min_col + 1).max(0)
    }

    pub fn is_empty(&self) -> bool {
        self.min_row > self.max_row || self.min_col > self.max_col
    }

    pub fn contains(&self, p: Point) -> bool {
        p.row >= self.min_row && p.row <= self.max_row && p.col >= self.min_col && p.col <= self.max_col
    }

    pub fn include(&mut self, p: Point) {
        self.min_row = self.min_row.min(p.row);
        self.min_col = self.min_col.min(p.col);
        self.max_row = self.max_row.max(p.row);
        self.max_col = self.max_col.max(p.col);
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox::new(
            self.min_row.min(other.min_row),
            self.min_col.min(other.min_col),
            self.max_row.max(other.max_row),
            self.max_col.max(other.max_col),
        )
    }

    /// Intersection with a `width` x `height` image; may come back empty.
    pub fn clipped(&self, width: usize, height: usize) -> BBox {
        BBox::new(
            self.min_row.max(0),
            self.min_col.max(0),
            self.max_row.min(height as i32 - 1),
            self.max_col.min(width as i32 - 1),
        )
    }

    pub fn translated(&self, drow: i32, dcol: i32) -> BBox {
        BBox::new(self.min_row + drow, self.min_col + dcol, self.max_row + drow, self.max_col + dcol)
    }
}

/// 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage { width, height });
        }
        if pixels.len() != width * height {
            return Err(ImageError::BufferSize { expected: width * height, actual: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self, ImageError> {
        Self::new(width, height, vec![rgb; width * height])
    }

    /// Builds an image from a packed `RGBRGB...` byte buffer.
    pub fn from_raw(width: usize, height: usize, raw: &[u8]) -> Result<Self, ImageError> {
        if raw.len() != width * height * 3 {
            return Err(ImageError::BufferSize { expected: width * height, actual: raw.len() / 3 });
        }
        let pixels = raw.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Self::new(width, height, pixels)
    }

    pub fn to_raw(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, [u8; 3]> {
        self.pixels.chunks_exact(self.width)
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        p.row >= 0 && p.col >= 0 && (p.row as usize) < self.height && (p.col as usize) < self.width
    }

    pub fn get(&self, p: Point) -> Option<[u8; 3]> {
        self.in_bounds(p).then(|| self.pixels[p.row as usize * self.width + p.col as usize])
    }

    /// Writes a pixel; out-of-bounds writes are ignored.
    pub fn put(&mut self, p: Point, rgb: [u8; 3]) {
        if self.in_bounds(p) {
            self.pixels[p.row as usize * self.width + p.col as usize] = rgb;
        }
    }
}

/// A colour in the hexcone HSV model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvPixel {
    /// Degrees in `[0, 360)`.
    pub hue: f64,
    pub saturation: f64,
    pub value: f64,
}

/// Hexcone RGB to HSV. Hue is reported as 0 wherever saturation is 0.
pub fn rgb_to_hsv(rgb: [u8; 3]) -> HsvPixel {
    let [r, g, b] = rgb.map(|c| f64::from(c) / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let value = max;
    let saturation = if max > 0.0 { delta / max } else { 0.0 };
    if delta == 0.0 {
        return HsvPixel { hue: 0.0, saturation, value };
    }

    let sector = if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    HsvPixel { hue: normalize_deg(sector * 60.0), saturation, value }
}

/// Inverse hexcone conversion, rounding each channel to the nearest 8-bit level.
pub fn hsv_to_rgb(hsv: HsvPixel) -> [u8; 3] {
    let c = hsv.value * hsv.saturation;
    let h = normalize_deg(hsv.hue) / 60.0;
    let x = c * (1.0 - (h.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = hsv.value - c;
    [r, g, b].map(|v| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8)
}

/// Per-pixel foreground (1) / background (0) mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySilhouette {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BinarySilhouette {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![0; width * height] }
    }

    /// Builds a mask from row-major bits; any nonzero byte counts as foreground.
    pub fn from_bits(width: usize, height: usize, bits: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage { width, height });
        }
        if bits.len() != width * height {
            return Err(ImageError::BufferSize { expected: width * height, actual: bits.len() });
        }
        let bits = bits.into_iter().map(|b| u8::from(b != 0)).collect();
        Ok(Self { width, height, bits })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(Point) -> bool) -> Self {
        let mut mask = Self::new(width, height);
        for row in 0..height {
            for col in 0..width {
                mask.bits[row * width + col] = u8::from(f(Point::new(row as i32, col as i32)));
            }
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        p.row >= 0 && p.col >= 0 && (p.row as usize) < self.height && (p.col as usize) < self.width
    }

    /// Foreground test; anything outside the image is background.
    #[inline]
    pub fn is_set(&self, p: Point) -> bool {
        self.in_bounds(p) && self.bits[p.row as usize * self.width + p.col as usize] != 0
    }

    pub fn set(&mut self, p: Point, on: bool) {
        if self.in_bounds(p) {
            self.bits[p.row as usize * self.width + p.col as usize] = u8::from(on);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    pub fn full_rect(&self) -> BBox {
        BBox::new(0, 0, self.height as i32 - 1, self.width as i32 - 1)
    }

    /// Iterates foreground pixel coordinates in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = Point> + '_ {
        let width = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(move |(i, _)| Point::new((i / width) as i32, (i % width) as i32))
    }
}

/// Exact number of foreground pixels inside `rect`, after clipping it to the mask.
pub fn mask_region_pixels(mask: &BinarySilhouette, rect: BBox) -> usize {
    let r = rect.clipped(mask.width, mask.height);
    if r.is_empty() {
        return 0;
    }
    let (c0, c1) = (r.min_col as usize, r.max_col as usize);
    (r.min_row as usize..=r.max_row as usize)
        .map(|row| {
            let start = row * mask.width;
            mask.bits[start + c0..=start + c1].iter().map(|&b| b as usize).sum::<usize>()
        })
        .sum()
}

/// Summed-area table for constant-time rectangle counts.
#[derive(Debug, Clone)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    sums: Vec<u32>,
}

impl IntegralImage {
    pub fn new(mask: &BinarySilhouette) -> Self {
        let (w, h) = (mask.width, mask.height);
        let stride = w + 1;
        let mut sums = vec![0u32; stride * (h + 1)];
        for row in 0..h {
            let mut running = 0u32;
            for col in 0..w {
                running += u32::from(mask.bits[row * w + col]);
                sums[(row + 1) * stride + col + 1] = sums[row * stride + col + 1] + running;
            }
        }
        Self { width: w, height: h, sums }
    }

    /// Same contract as [`mask_region_pixels`].
    pub fn count(&self, rect: BBox) -> usize {
        let r = rect.clipped(self.width, self.height);
        if r.is_empty() {
            return 0;
        }
        let stride = self.width + 1;
        let (top, left) = (r.min_row as usize, r.min_col as usize);
        let (bottom, right) = (r.max_row as usize + 1, r.max_col as usize + 1);
        let s = &self.sums;
        (s[bottom * stride + right] + s[top * stride + left] - s[top * stride + right] - s[bottom * stride + left])
            as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primary_and_gray_conversions() {
        let red = rgb_to_hsv([255, 0, 0]);
        assert_eq!((red.hue, red.saturation, red.value), (0.0, 1.0, 1.0));

        let black = rgb_to_hsv([0, 0, 0]);
        assert_eq!((black.hue, black.saturation, black.value), (0.0, 0.0, 0.0));

        let gray = rgb_to_hsv([128, 128, 128]);
        assert_eq!(gray.hue, 0.0);
        assert_eq!(gray.saturation, 0.0);
        assert!((gray.value - 128.0 / 255.0).abs() < 1e-12);
        assert!((gray.value - 0.502).abs() < 1e-3);
    }

    #[test]
    fn hue_sectors() {
        assert!((rgb_to_hsv([0, 255, 0]).hue - 120.0).abs() < 1e-12);
        assert!((rgb_to_hsv([0, 0, 255]).hue - 240.0).abs() < 1e-12);
        assert!((rgb_to_hsv([255, 0, 255]).hue - 300.0).abs() < 1e-12);
        assert!((rgb_to_hsv([255, 255, 0]).hue - 60.0).abs() < 1e-12);
    }

    #[test]
    fn hsv_round_trip_on_grid() {
        for r in (0..=255).step_by(5) {
            for g in (0..=255).step_by(5) {
                for b in (0..=255).step_by(5) {
                    let rgb = [r as u8, g as u8, b as u8];
                    let back = hsv_to_rgb(rgb_to_hsv(rgb));
                    for ch in 0..3 {
                        assert!((i16::from(back[ch]) - i16::from(rgb[ch])).abs() <= 1, "{rgb:?} -> {back:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn region_counts() {
        let empty = BinarySilhouette::new(12, 9);
        assert_eq!(mask_region_pixels(&empty, BBox::new(2, 3, 8, 11)), 0);

        let full = BinarySilhouette::from_fn(10, 10, |_| true);
        assert_eq!(mask_region_pixels(&full, full.full_rect()), 100);
        assert_eq!(mask_region_pixels(&full, BBox::new(-5, -5, 20, 20)), 100);
        assert_eq!(mask_region_pixels(&full, BBox::new(20, 20, 30, 30)), 0);
    }

    #[test]
    fn rgb_image_rejects_bad_buffers() {
        assert_eq!(RgbImage::new(0, 4, vec![]), Err(ImageError::EmptyImage { width: 0, height: 4 }));
        assert!(matches!(RgbImage::new(2, 2, vec![[0; 3]; 3]), Err(ImageError::BufferSize { .. })));
    }

    #[test]
    fn direction_convention() {
        let o = Point::new(10, 10);
        assert_eq!(o.direction_to(Point::new(10, 20)), 0.0);
        assert_eq!(o.direction_to(Point::new(0, 10)), 90.0);
        assert_eq!(o.direction_to(Point::new(10, 0)), 180.0);
        assert_eq!(o.direction_to(Point::new(20, 10)), 270.0);
    }

    fn random_mask(bits: Vec<bool>, w: usize, h: usize) -> BinarySilhouette {
        BinarySilhouette::from_bits(w, h, bits.into_iter().map(u8::from).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn region_count_matches_naive_loop(
            bits in proptest::collection::vec(any::<bool>(), 256),
            r0 in -3i32..18, c0 in -3i32..18, r1 in -3i32..18, c1 in -3i32..18,
        ) {
            let mask = random_mask(bits, 16, 16);
            let rect = BBox::new(r0, c0, r1, c1);
            let mut naive = 0;
            for row in r0..=r1 {
                for col in c0..=c1 {
                    if mask.is_set(Point::new(row, col)) {
                        naive += 1;
                    }
                }
            }
            prop_assert_eq!(mask_region_pixels(&mask, rect), naive);
            prop_assert_eq!(IntegralImage::new(&mask).count(rect), naive);
        }

        #[test]
        fn region_count_is_additive(
            bits in proptest::collection::vec(any::<bool>(), 256),
            split_row in 0i32..16, split_col in 0i32..16,
        ) {
            let mask = random_mask(bits, 16, 16);
            let whole = mask_region_pixels(&mask, mask.full_rect());
            let parts = [
                BBox::new(0, 0, split_row - 1, split_col - 1),
                BBox::new(0, split_col, split_row - 1, 15),
                BBox::new(split_row, 0, 15, split_col - 1),
                BBox::new(split_row, split_col, 15, 15),
            ];
            let sum: usize = parts.iter().map(|&p| mask_region_pixels(&mask, p)).sum();
            prop_assert_eq!(sum, whole);
        }
    }
}
