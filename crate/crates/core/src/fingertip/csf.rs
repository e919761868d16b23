//! Circular separability filter.
//!
//! The window is a `square_side` square with a concentric disc of radius
//! `circle_radius`. The response at a point is the foreground fraction inside
//! the disc minus the foreground fraction in the rest of the square, so it lies
//! in `[-1, 1]`: a round cap of skin on an otherwise empty surround scores high,
//! while uniform regions and straight edges score near zero.
//!
//! Parts of the window that fall outside the image are excluded from both means.

use serde::{Deserialize, Serialize};

use crate::image::{BBox, BinarySilhouette, IntegralImage, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsfGeometry {
    pub circle_radius: u32,
    pub square_side: u32,
}

impl Default for CsfGeometry {
    fn default() -> Self {
        Self { circle_radius: 5, square_side: 20 }
    }
}

impl CsfGeometry {
    pub fn is_valid(&self) -> bool {
        self.circle_radius > 0 && self.square_side > 0 && 2 * self.circle_radius < self.square_side
    }

    /// Square offsets relative to the centre, inclusive. Even sides extend one
    /// pixel further up/left than down/right.
    pub fn square_offsets(&self) -> (i32, i32) {
        let side = self.square_side as i32;
        (-(side / 2), side - side / 2 - 1)
    }

    /// `(dy, half_width)` spans making up the disc.
    pub(crate) fn disc_spans(&self) -> Vec<(i32, i32)> {
        let r = self.circle_radius as i32;
        (-r..=r)
            .map(|dy| {
                let mut half = 0;
                while (half + 1) * (half + 1) + dy * dy <= r * r {
                    half += 1;
                }
                (dy, half)
            })
            .collect()
    }
}

/// Evaluates the filter at arbitrary points of one mask using row prefix sums
/// for the disc and a summed-area table for the square.
pub struct CsfEvaluator<'a> {
    mask: &'a BinarySilhouette,
    geom: CsfGeometry,
    integral: IntegralImage,
    row_prefix: Vec<u32>,
    spans: Vec<(i32, i32)>,
}

impl<'a> CsfEvaluator<'a> {
    pub fn new(mask: &'a BinarySilhouette, geom: CsfGeometry) -> Self {
        let (w, h) = (mask.width(), mask.height());
        let mut row_prefix = vec![0u32; (w + 1) * h];
        for (row, bits) in mask.bits().chunks_exact(w).enumerate() {
            let out = &mut row_prefix[row * (w + 1)..(row + 1) * (w + 1)];
            for (col, &b) in bits.iter().enumerate() {
                out[col + 1] = out[col] + u32::from(b);
            }
        }
        Self { mask, geom, integral: IntegralImage::new(mask), row_prefix, spans: geom.disc_spans() }
    }

    pub fn mask(&self) -> &BinarySilhouette {
        self.mask
    }

    pub fn geometry(&self) -> CsfGeometry {
        self.geom
    }

    /// Raw counts `(disc_fg, disc_n, square_fg, square_n)` for the window at `center`.
    pub fn counts(&self, center: Point) -> (u32, u32, u32, u32) {
        let (w, h) = (self.mask.width() as i32, self.mask.height() as i32);
        let stride = w as usize + 1;
        let (mut disc_fg, mut disc_n) = (0u32, 0u32);
        for &(dy, half) in &self.spans {
            let row = center.row + dy;
            if row < 0 || row >= h {
                continue;
            }
            let c0 = (center.col - half).max(0);
            let c1 = (center.col + half).min(w - 1);
            if c0 > c1 {
                continue;
            }
            let base = row as usize * stride;
            disc_fg += self.row_prefix[base + c1 as usize + 1] - self.row_prefix[base + c0 as usize];
            disc_n += (c1 - c0 + 1) as u32;
        }

        let (lo, hi) = self.geom.square_offsets();
        let square = BBox::new(center.row + lo, center.col + lo, center.row + hi, center.col + hi)
            .clipped(w as usize, h as usize);
        let square_n = if square.is_empty() { 0 } else { (square.height() * square.width()) as u32 };
        let square_fg = self.integral.count(square) as u32;
        (disc_fg, disc_n, square_fg, square_n)
    }

    pub fn response(&self, center: Point) -> f64 {
        let (disc_fg, disc_n, square_fg, square_n) = self.counts(center);
        separability(disc_fg, disc_n, square_fg - disc_fg, square_n - disc_n)
    }
}

/// Disc-minus-surround contrast from raw counts; empty regions contribute 0.
pub fn separability(disc_fg: u32, disc_n: u32, ring_fg: u32, ring_n: u32) -> f64 {
    let frac = |fg: u32, n: u32| if n == 0 { 0.0 } else { f64::from(fg) / f64::from(n) };
    frac(disc_fg, disc_n) - frac(ring_fg, ring_n)
}

/// Filter response at a single point. Prefer [`CsfEvaluator`] for many points.
pub fn csf_response(mask: &BinarySilhouette, center: Point, geom: CsfGeometry) -> f64 {
    CsfEvaluator::new(mask, geom).response(center)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Visits every square pixel and classifies it by squared distance.
    fn brute_force(mask: &BinarySilhouette, c: Point, geom: CsfGeometry) -> f64 {
        let side = geom.square_side as i32;
        let r2 = (geom.circle_radius * geom.circle_radius) as i32;
        let (mut dfg, mut dn, mut rfg, mut rn) = (0, 0, 0, 0);
        for dy in -(side / 2)..(side - side / 2) {
            for dx in -(side / 2)..(side - side / 2) {
                let p = c.translated(dy, dx);
                if !mask.in_bounds(p) {
                    continue;
                }
                let fg = u32::from(mask.is_set(p));
                if dx * dx + dy * dy <= r2 {
                    dfg += fg;
                    dn += 1;
                } else {
                    rfg += fg;
                    rn += 1;
                }
            }
        }
        separability(dfg, dn, rfg, rn)
    }

    #[test]
    fn default_disc_has_81_pixels() {
        let spans = CsfGeometry::default().disc_spans();
        let n: i32 = spans.iter().map(|&(_, h)| 2 * h + 1).sum();
        assert_eq!(n, 81);
        assert_eq!(CsfGeometry::default().square_offsets(), (-10, 9));
    }

    #[test]
    fn uniform_windows_score_zero() {
        let geom = CsfGeometry::default();
        let empty = BinarySilhouette::new(40, 40);
        assert_eq!(csf_response(&empty, Point::new(20, 20), geom), 0.0);
        let full = BinarySilhouette::from_fn(40, 40, |_| true);
        assert_eq!(csf_response(&full, Point::new(20, 20), geom), 0.0);
        assert_eq!(csf_response(&full, Point::new(0, 0), geom), 0.0);
    }

    #[test]
    fn isolated_disc_scores_one_minus_overflow() {
        // a radius-5 disc drawn with a slightly larger radius test spills into the ring
        let geom = CsfGeometry::default();
        let c = Point::new(20, 20);
        let disc = BinarySilhouette::from_fn(41, 41, |p| {
            let (dr, dc) = (p.row - c.row, p.col - c.col);
            dr * dr + dc * dc <= 26
        });
        // enumerate: disc pixels with r^2 <= 25 are all set; the ring holds the
        // pixels with 25 < r^2 <= 26 (the eight (±5, ±1)/(±1, ±5) points)
        let ring_fg = (-10..10)
            .flat_map(|dy: i32| (-10..10).map(move |dx: i32| (dy, dx)))
            .filter(|&(dy, dx)| dx * dx + dy * dy > 25 && dx * dx + dy * dy <= 26)
            .count();
        assert_eq!(ring_fg, 8);
        let expected = 1.0 - 8.0 / 319.0;
        assert_eq!(csf_response(&disc, c, geom), expected);
    }

    #[test]
    fn border_windows_exclude_clipped_area() {
        let geom = CsfGeometry::default();
        let mask = BinarySilhouette::from_fn(30, 30, |p| p.row < 3 && p.col < 3);
        let c = Point::new(0, 0);
        assert_eq!(csf_response(&mask, c, geom), brute_force(&mask, c, geom));
        // the clipped quarter disc holds 26 pixels, 9 of them set; the ring is empty
        assert_eq!(csf_response(&mask, c, geom), 9.0 / 26.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn equals_brute_force_everywhere(
            bits in proptest::collection::vec(prop::bool::weighted(0.5), 32 * 32),
            radius in 1u32..6,
            extra in 1u32..8,
        ) {
            let mask = BinarySilhouette::from_bits(32, 32, bits.into_iter().map(u8::from).collect()).unwrap();
            let geom = CsfGeometry { circle_radius: radius, square_side: 2 * radius + extra };
            let eval = CsfEvaluator::new(&mask, geom);
            for row in 0..32 {
                for col in 0..32 {
                    let p = Point::new(row, col);
                    prop_assert_eq!(eval.response(p), brute_force(&mask, p, geom));
                }
            }
        }
    }
}
