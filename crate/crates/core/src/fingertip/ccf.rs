//! Concentric circular filter: finger orientation at an approximate tip.

use serde::{Deserialize, Serialize};

use super::{TipCandidate, TipError};
use crate::blob::label_components;
use crate::image::{direction_deg, BinarySilhouette, Point};

/// Offsets closer than this to the candidate give no usable direction.
pub const MIN_CENTROID_OFFSET: f64 = 0.5;

/// Two concentric discs inside a bounding square, with a level value per zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcfGeometry {
    pub inner_diameter: u32,
    pub outer_diameter: u32,
    pub inner_weight: i32,
    pub mid_weight: i32,
    pub outer_weight: i32,
}

impl Default for CcfGeometry {
    fn default() -> Self {
        Self { inner_diameter: 10, outer_diameter: 20, inner_weight: 2, mid_weight: -2, outer_weight: 0 }
    }
}

impl CcfGeometry {
    pub fn is_valid(&self) -> bool {
        self.inner_diameter > 0 && self.inner_diameter < self.outer_diameter
    }

    fn within(diameter: u32, dy: i32, dx: i32) -> bool {
        // (2r)^2 <= d^2 keeps odd diameters exact in integers
        4 * (dx * dx + dy * dy) <= (diameter * diameter) as i32
    }

    /// Level value of the offset `(dy, dx)` from the filter centre.
    pub fn weight_at(&self, dy: i32, dx: i32) -> i32 {
        if Self::within(self.inner_diameter, dy, dx) {
            self.inner_weight
        } else if Self::within(self.outer_diameter, dy, dx) {
            self.mid_weight
        } else {
            self.outer_weight
        }
    }
}

/// Weighted sum of foreground pixels over the filter window. Diagnostic only;
/// orientation comes from [`ccf_orientation`].
pub fn ccf_score(mask: &BinarySilhouette, center: Point, geom: &CcfGeometry) -> i64 {
    let half = geom.outer_diameter as i32 / 2;
    let mut score = 0i64;
    for dy in -half..=half {
        for dx in -half..=half {
            if mask.is_set(center.translated(dy, dx)) {
                score += i64::from(geom.weight_at(dy, dx));
            }
        }
    }
    score
}

/// Finger direction at `candidate`, in degrees.
///
/// Foreground pixels inside the outer disc centred on the candidate's
/// real-valued centroid are grouped by 8-connectivity and the largest group is
/// kept. The outer disc is used because the inner one sits wholly inside any
/// finger wider than `inner_diameter` at the candidate, leaving nothing to
/// measure.
///
/// The group is mirror-symmetric about the finger axis, so that axis is one of
/// its two principal axes. The offset from the group centroid to the candidate
/// picks which one and gives it a sign. The offset alone is only a few pixels
/// long and tilts by several degrees with any sideways error in the candidate;
/// the principal axis does not.
pub fn ccf_orientation(mask: &BinarySilhouette, candidate: &TipCandidate, geom: &CcfGeometry) -> Result<f64, TipError> {
    let at = candidate.approx;
    let (cr, cc) = candidate.centroid;
    let radius2 = f64::from(geom.outer_diameter).powi(2) / 4.0;
    let reach = (geom.outer_diameter as i32 + 1) / 2 + 1;
    let side = (2 * reach + 1) as usize;
    let local = BinarySilhouette::from_fn(side, side, |p| {
        let q = at.translated(p.row - reach, p.col - reach);
        let (dy, dx) = (f64::from(q.row) - cr, f64::from(q.col) - cc);
        dy * dy + dx * dx <= radius2 && mask.is_set(q)
    });

    let regions = label_components(&local);
    let largest = regions
        .components()
        .iter()
        .max_by(|a, b| a.size.cmp(&b.size).then(b.id.cmp(&a.id)))
        .ok_or(TipError::DegenerateNeighborhood { at })?;
    // positions relative to the candidate centroid
    let group: Vec<(f64, f64)> = local
        .foreground()
        .filter(|&p| regions.label_at(p) == largest.id)
        .map(|p| (f64::from(p.row - reach + at.row) - cr, f64::from(p.col - reach + at.col) - cc))
        .collect();

    let n = group.len() as f64;
    let mean_r = group.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_c = group.iter().map(|p| p.1).sum::<f64>() / n;
    let (off_r, off_c) = (-mean_r, -mean_c);
    if off_r.hypot(off_c) < MIN_CENTROID_OFFSET {
        return Err(TipError::DegenerateNeighborhood { at });
    }

    let (mut srr, mut scc, mut src) = (0.0, 0.0, 0.0);
    for &(r, c) in &group {
        let (r, c) = (r - mean_r, c - mean_c);
        srr += r * r;
        scc += c * c;
        src += r * c;
    }
    if (scc - srr).abs() < 1e-9 && src.abs() < 1e-9 {
        // isotropic: no preferred axis
        return Ok(direction_deg(off_r, off_c));
    }
    let phi = 0.5 * (2.0 * src).atan2(scc - srr);
    let axes = [(phi.sin(), phi.cos()), (phi.cos(), -phi.sin())];
    let (ur, uc, along) = axes
        .iter()
        .map(|&(ur, uc)| (ur, uc, off_r * ur + off_c * uc))
        .max_by(|a, b| a.2.abs().total_cmp(&b.2.abs()))
        .expect("two axes");
    Ok(direction_deg(along.signum() * ur, along.signum() * uc))
}
