//! Fingertip detection: separability-filter candidates, concentric-filter
//! orientation, and a straight-line trace to the exact tip.

mod ccf;
mod csf;
mod trace;

pub use ccf::{ccf_orientation, ccf_score, CcfGeometry, MIN_CENTROID_OFFSET};
pub use csf::{csf_response, separability, CsfEvaluator, CsfGeometry};
pub use trace::{refine_tip, trace_step};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blob::{label_components, HandRegion};
use crate::image::{BBox, BinarySilhouette, Point};

/// Fingertips kept per hand.
pub const MAX_TIPS_PER_HAND: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TipError {
    #[error("no usable finger direction around {at:?}")]
    DegenerateNeighborhood { at: Point },
    #[error("approximate tip {at:?} is not a foreground pixel")]
    NotForeground { at: Point },
    #[error("trace from {at:?} ran {length} px without leaving the silhouette")]
    TraceOverrun { at: Point, length: f64 },
    #[error("trace step must be positive, got {0}")]
    InvalidStep(f64),
}

/// Approximate fingertip: the centroid of one group of filter-passing pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipCandidate {
    /// `centroid` rounded to the nearest pixel.
    pub approx: Point,
    /// Real-valued group centroid, `(row, col)`.
    pub centroid: (f64, f64),
    pub group_size: usize,
    pub hand_ordinal: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fingertip {
    pub exact: Point,
    /// Real-valued last foreground sample of the trace; rounds to `exact`.
    pub trace_end: (f64, f64),
    /// Finger direction in degrees, `[0, 360)`.
    pub theta: f64,
    pub hand_ordinal: u8,
}

/// Tunables for the whole fingertip stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipParams {
    pub csf: CsfGeometry,
    pub ccf: CcfGeometry,
    pub score_min: f64,
    pub group_min: usize,
    pub step: f64,
}

impl Default for TipParams {
    fn default() -> Self {
        Self { csf: CsfGeometry::default(), ccf: CcfGeometry::default(), score_min: 0.63, group_min: 4, step: 1.0 }
    }
}

impl TipParams {
    /// Longest trace accepted before a candidate is dropped.
    pub fn max_trace(&self) -> f64 {
        f64::from(self.csf.square_side)
    }
}

/// Groups passing pixels by 8-connectivity and returns one candidate per group of
/// at least `group_min` pixels, largest groups first, at most [`MAX_TIPS_PER_HAND`].
///
/// `passing` is a local mask whose pixel `(0, 0)` sits at `origin` in the frame.
pub fn group_candidates(
    passing: &BinarySilhouette,
    origin: Point,
    group_min: usize,
    hand_ordinal: u8,
) -> Vec<TipCandidate> {
    let regions = label_components(passing);
    let mut sums = vec![(0i64, 0i64); regions.len()];
    for p in passing.foreground() {
        let id = regions.label_at(p) as usize;
        sums[id - 1].0 += i64::from(p.row);
        sums[id - 1].1 += i64::from(p.col);
    }

    let mut out: Vec<TipCandidate> = regions
        .components()
        .iter()
        .filter(|c| c.size >= group_min.max(1))
        .map(|c| {
            let (sr, sc) = sums[c.id as usize - 1];
            let n = c.size as f64;
            let centroid = (sr as f64 / n + f64::from(origin.row), sc as f64 / n + f64::from(origin.col));
            TipCandidate {
                approx: Point::round_from(centroid.0, centroid.1),
                centroid,
                group_size: c.size,
                hand_ordinal,
            }
        })
        .collect();
    out.sort_by(|a, b| b.group_size.cmp(&a.group_size).then(a.approx.cmp(&b.approx)));
    out.truncate(MAX_TIPS_PER_HAND);
    out
}

/// Candidate fingertips of one hand.
///
/// The filter is evaluated at every foreground pixel of `hand_mask` inside the
/// hand's bounding box; `csf` may be built over a larger mask (both hands) and
/// shared between them.
pub fn detect_candidates(
    csf: &CsfEvaluator<'_>,
    hand_mask: &BinarySilhouette,
    hand: &HandRegion,
    score_min: f64,
    group_min: usize,
) -> Vec<TipCandidate> {
    let bbox: BBox = hand.bbox.clipped(hand_mask.width(), hand_mask.height());
    if bbox.is_empty() {
        return Vec::new();
    }
    let origin = Point::new(bbox.min_row, bbox.min_col);
    let passing = BinarySilhouette::from_fn(bbox.width() as usize, bbox.height() as usize, |local| {
        let p = local.translated(origin.row, origin.col);
        hand_mask.is_set(p) && csf.response(p) >= score_min
    });
    group_candidates(&passing, origin, group_min, hand.ordinal)
}

/// Full fingertip stage for one hand. Candidates whose orientation is undefined,
/// or whose trace overruns, are dropped.
pub fn detect_fingertips(
    csf: &CsfEvaluator<'_>,
    hand_mask: &BinarySilhouette,
    hand: &HandRegion,
    params: &TipParams,
) -> Vec<Fingertip> {
    detect_candidates(csf, hand_mask, hand, params.score_min, params.group_min)
        .iter()
        .filter_map(|c| {
            let theta = ccf_orientation(hand_mask, c, &params.ccf).ok()?;
            refine_tip(hand_mask, c, theta, params.step, params.max_trace()).ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blob::select_hands;

    #[test]
    fn group_size_filter() {
        // a 12-pixel group and a 2-pixel group
        let passing = BinarySilhouette::from_fn(20, 10, |p| {
            (p.row < 3 && p.col < 4) || (p.row == 8 && (15..17).contains(&p.col))
        });
        let cands = group_candidates(&passing, Point::new(100, 50), 4, 1);
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].group_size, 12);
        assert_eq!(cands[0].approx, Point::new(101, 52));
        assert_eq!(cands[0].hand_ordinal, 1);
    }

    #[test]
    fn at_most_five_groups() {
        let passing = BinarySilhouette::from_fn(40, 3, |p| p.col % 5 == 0 && p.row == 1 || p.col % 5 == 1);
        let cands = group_candidates(&passing, Point::default(), 1, 0);
        assert_eq!(cands.len(), MAX_TIPS_PER_HAND);
    }

    #[test]
    fn filled_square_has_no_candidates() {
        let mask = BinarySilhouette::from_fn(80, 80, |p| (20..60).contains(&p.row) && (20..60).contains(&p.col));
        let hand = select_hands(&label_components(&mask), 1)[0];
        let eval = CsfEvaluator::new(&mask, CsfGeometry::default());
        let params = TipParams::default();
        assert!(detect_candidates(&eval, &mask, &hand, params.score_min, params.group_min).is_empty());
    }
}
