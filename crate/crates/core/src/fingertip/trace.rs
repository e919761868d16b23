//! Walks from an approximate tip along the finger direction to the silhouette edge.

use super::{Fingertip, TipCandidate, TipError};
use crate::image::{BinarySilhouette, Point};

/// Unit step `(drow, dcol)` for direction `theta` in degrees.
///
/// The column advances by `cos(-theta)` and the row by `sin(-theta)`: with rows
/// growing downward, a finger pointing up (90°) walks towards row 0.
pub fn trace_step(theta_deg: f64) -> (f64, f64) {
    let t = -theta_deg.to_radians();
    (t.sin(), t.cos())
}

/// Advances from `candidate.approx` in steps of `step` pixels along `theta`
/// until the next sample would be background or off-image.
///
/// Positions stay real-valued between steps and are rounded only for the
/// foreground test. The walk fails with [`TipError::TraceOverrun`] once it has
/// covered more than `max_length` pixels.
pub fn refine_tip(
    mask: &BinarySilhouette,
    candidate: &TipCandidate,
    theta: f64,
    step: f64,
    max_length: f64,
) -> Result<Fingertip, TipError> {
    let start = candidate.approx;
    if !mask.is_set(start) {
        return Err(TipError::NotForeground { at: start });
    }
    if !(step > 0.0) {
        return Err(TipError::InvalidStep(step));
    }

    let (unit_r, unit_c) = trace_step(theta);
    let (dr, dc) = (unit_r * step, unit_c * step);
    let (mut row, mut col) = (f64::from(start.row), f64::from(start.col));
    let mut steps = 0u32;
    loop {
        let (next_r, next_c) = (row + dr, col + dc);
        if !mask.is_set(Point::round_from(next_r, next_c)) {
            break;
        }
        row = next_r;
        col = next_c;
        steps += 1;
        if f64::from(steps) * step > max_length {
            return Err(TipError::TraceOverrun { at: start, length: f64::from(steps) * step });
        }
    }

    Ok(Fingertip {
        exact: Point::round_from(row, col),
        trace_end: (row, col),
        theta,
        hand_ordinal: candidate.hand_ordinal,
    })
}
