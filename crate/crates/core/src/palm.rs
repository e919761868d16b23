//! Centre-of-palm (COP) search by full-skin window voting.
//!
//! Every `window` x `window` position inside the hand's bounding box whose skin
//! count reaches `fill_min * window^2` votes with its centre; the COP is the mean
//! of all votes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blob::HandRegion;
use crate::image::{BBox, BinarySilhouette, IntegralImage, Point};

/// Window side at the 240x230 baseline resolution.
pub const BASELINE_WINDOW: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PalmError {
    #[error("hand {hand} bounding box {bbox:?} is smaller than the {window}px window")]
    HandTooSmall { hand: u8, bbox: BBox, window: usize },
    #[error("no {window}px window of hand {hand} reaches the fill threshold")]
    NoPalmFound { hand: u8, window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PalmCenter {
    pub cop: Point,
    /// Unrounded mean of the voting window centres.
    pub mean: (f64, f64),
    pub candidate_count: usize,
    pub hand_ordinal: u8,
}

/// Window side scaled with image area relative to the baseline resolution.
pub fn scaled_window(width: usize, height: usize) -> usize {
    let scale = ((width * height) as f64 / (crate::BASELINE_WIDTH * crate::BASELINE_HEIGHT) as f64).sqrt();
    ((BASELINE_WINDOW as f64 * scale).round() as usize).max(1)
}

/// Locates the COP of `hand` from its own silhouette.
pub fn find_cop(
    hand_mask: &BinarySilhouette,
    hand: &HandRegion,
    window: usize,
    fill_min: f64,
) -> Result<PalmCenter, PalmError> {
    let bbox = hand.bbox.clipped(hand_mask.width(), hand_mask.height());
    let win = window as i32;
    if window == 0 || bbox.height() < win || bbox.width() < win {
        return Err(PalmError::HandTooSmall { hand: hand.ordinal, bbox: hand.bbox, window });
    }

    let integral = IntegralImage::new(hand_mask);
    let needed = fill_min * (window * window) as f64;
    let (mut sum_r, mut sum_c, mut votes) = (0i64, 0i64, 0usize);
    for top in bbox.min_row..=bbox.max_row - win + 1 {
        for left in bbox.min_col..=bbox.max_col - win + 1 {
            let count = integral.count(BBox::new(top, left, top + win - 1, left + win - 1));
            if count as f64 >= needed {
                sum_r += i64::from(top);
                sum_c += i64::from(left);
                votes += 1;
            }
        }
    }
    if votes == 0 {
        return Err(PalmError::NoPalmFound { hand: hand.ordinal, window });
    }

    let offset = (window as f64 - 1.0) / 2.0;
    let mean = (sum_r as f64 / votes as f64 + offset, sum_c as f64 / votes as f64 + offset);
    Ok(PalmCenter { cop: Point::round_from(mean.0, mean.1), mean, candidate_count: votes, hand_ordinal: hand.ordinal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blob::{label_components, select_hands};
    use proptest::prelude::*;

    fn only_hand(mask: &BinarySilhouette) -> HandRegion {
        select_hands(&label_components(mask), 1)[0]
    }

    #[test]
    fn solid_square_centre() {
        // rows/cols 20..80: centre at 49.5
        let mask = BinarySilhouette::from_fn(100, 100, |p| (20..80).contains(&p.row) && (20..80).contains(&p.col));
        let palm = find_cop(&mask, &only_hand(&mask), 30, 0.95).unwrap();
        assert_eq!(palm.mean, (49.5, 49.5));
        assert!((palm.cop.row - 49).abs() <= 1 && (palm.cop.col - 49).abs() <= 1);
        // a full 60x60 block accepts every one of the 31x31 positions
        assert_eq!(palm.candidate_count, 31 * 31);
    }

    #[test]
    fn thin_bar_has_no_palm() {
        let mask = BinarySilhouette::from_fn(100, 100, |p| (10..90).contains(&p.row) && (40..50).contains(&p.col));
        let mut hand = only_hand(&mask);
        // widen the box so the window fits; the bar itself is still only 10px wide
        hand.bbox = BBox::new(10, 20, 89, 69);
        assert_eq!(find_cop(&mask, &hand, 30, 0.95), Err(PalmError::NoPalmFound { hand: 0, window: 30 }));
    }

    #[test]
    fn small_box_is_rejected() {
        let mask = BinarySilhouette::from_fn(100, 100, |p| (10..90).contains(&p.row) && (40..50).contains(&p.col));
        assert!(matches!(find_cop(&mask, &only_hand(&mask), 30, 0.95), Err(PalmError::HandTooSmall { .. })));
    }

    #[test]
    fn baseline_window_is_unscaled() {
        assert_eq!(scaled_window(240, 230), 30);
        assert_eq!(scaled_window(480, 460), 60);
    }

    fn disc_with_bump(shift_r: i32, shift_c: i32) -> BinarySilhouette {
        BinarySilhouette::from_fn(120, 120, move |p| {
            let (r, c) = (p.row - shift_r, p.col - shift_c);
            let disc = (r - 50).pow(2) + (c - 50).pow(2) <= 26 * 26;
            let bump = (20..50).contains(&r) && (70..80).contains(&c);
            disc || bump
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn translation_equivariant(dr in -15i32..15, dc in -15i32..15) {
            let base = disc_with_bump(0, 0);
            let moved = disc_with_bump(dr, dc);
            let a = find_cop(&base, &only_hand(&base), 30, 0.95).unwrap();
            let b = find_cop(&moved, &only_hand(&moved), 30, 0.95).unwrap();
            prop_assert_eq!(a.cop.translated(dr, dc), b.cop);
            prop_assert_eq!(a.candidate_count, b.candidate_count);
        }

        #[test]
        fn raising_fill_never_adds_votes(lo in 0.5f64..1.0, step in 0.0f64..0.3) {
            let mask = disc_with_bump(0, 0);
            let hand = only_hand(&mask);
            let count = |f: f64| find_cop(&mask, &hand, 30, f).map(|p| p.candidate_count).unwrap_or(0);
            prop_assert!(count((lo + step).min(1.0)) <= count(lo));
        }

        #[test]
        fn cop_lies_on_the_hand(dr in -15i32..15, dc in -15i32..15) {
            let mask = disc_with_bump(dr, dc);
            let palm = find_cop(&mask, &only_hand(&mask), 30, 0.95).unwrap();
            // the disc is convex and contains the COP, hence so does the hand's hull
            prop_assert!(mask.is_set(palm.cop));
        }
    }
}
