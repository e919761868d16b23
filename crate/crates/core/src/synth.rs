//! Parametric hand renderer with exact ground truth.
//!
//! A hand is a disc palm plus straight finger strips with semicircular caps,
//! each strip running from the palm centre along its base angle. Bending is
//! modelled radially: a finger bent by `a1` keeps its direction and has its tip
//! at `d = d_ref/3 + (2 d_ref/3)(1 - a1/90)` from the palm centre, where
//! `d_ref` is its straight length.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::{BinarySilhouette, Point, RgbImage};

pub const SKIN_RGB: [u8; 3] = [224, 172, 140];
pub const BACKGROUND_RGB: [u8; 3] = [40, 60, 160];
/// Smallest palm radius accepted at the baseline resolution.
pub const MIN_PALM_RADIUS: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("hand {hand} does not fit inside the {width}x{height} frame with a 1px margin")]
    SpecOverflow { hand: usize, width: usize, height: usize },
    #[error("hands {0} and {1} touch or overlap")]
    HandsTouch(usize, usize),
    #[error("invalid hand spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerSpec {
    /// Direction from the palm centre, degrees.
    pub base_angle: f64,
    /// Full strip width; pixels with perpendicular offset `<= width / 2` are set.
    pub width: f64,
    /// Tip to palm-centre distance when straight (`d_ref`).
    pub straight_length: f64,
    /// Bend from straight, `[0, 90]`.
    pub a1: f64,
}

impl FingerSpec {
    pub fn tip_distance(&self) -> f64 {
        let d_ref = self.straight_length;
        d_ref / 3.0 + (2.0 * d_ref / 3.0) * (1.0 - self.a1 / 90.0)
    }

    /// `(drow, dcol)` unit vector along the finger.
    fn unit(&self) -> (f64, f64) {
        let t = self.base_angle.to_radians();
        (-t.sin(), t.cos())
    }

    fn covers(&self, py: f64, px: f64) -> bool {
        let (dr, dc) = self.unit();
        let half = self.width / 2.0;
        let shaft = self.tip_distance() - half;
        let along = px * dc + py * dr;
        let across = (py * dc - px * dr).abs();
        let in_strip = (0.0..=shaft).contains(&along) && across <= half;
        let (cy, cx) = (py - shaft * dr, px - shaft * dc);
        in_strip || cy * cy + cx * cx <= half * half
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandSpec {
    pub palm_center: Point,
    pub palm_radius: f64,
    /// Listed clockwise on screen, which is the order the pipeline reports them in.
    pub fingers: Vec<FingerSpec>,
    pub skin: [u8; 3],
}

impl HandSpec {
    fn validate(&self, scale: f64) -> Result<(), SynthError> {
        if self.palm_radius < MIN_PALM_RADIUS * scale {
            return Err(SynthError::InvalidSpec(format!(
                "palm radius {} below {}",
                self.palm_radius,
                MIN_PALM_RADIUS * scale
            )));
        }
        for f in &self.fingers {
            if !(0.0..=90.0).contains(&f.a1) {
                return Err(SynthError::InvalidSpec(format!("bend {} outside [0, 90]", f.a1)));
            }
            if !(f.width > 0.0 && f.tip_distance() > f.width / 2.0) {
                return Err(SynthError::InvalidSpec(format!("finger at {}° is degenerate", f.base_angle)));
            }
        }
        // strips must stay apart where they leave the palm
        for (i, a) in self.fingers.iter().enumerate() {
            for b in &self.fingers[i + 1..] {
                let gap = (a.base_angle - b.base_angle).to_radians();
                let sep = 2.0 * self.palm_radius * (gap / 2.0).sin().abs();
                if sep < a.width.max(b.width) + 1.0 {
                    return Err(SynthError::InvalidSpec(format!(
                        "fingers at {}° and {}° overlap",
                        a.base_angle, b.base_angle
                    )));
                }
            }
        }
        Ok(())
    }

    fn covers(&self, p: Point) -> bool {
        let py = f64::from(p.row - self.palm_center.row);
        let px = f64::from(p.col - self.palm_center.col);
        py * py + px * px <= self.palm_radius * self.palm_radius || self.fingers.iter().any(|f| f.covers(py, px))
    }

    fn reach(&self) -> i32 {
        let fingers = self.fingers.iter().map(|f| f.tip_distance()).fold(0.0, f64::max);
        self.palm_radius.max(fingers).ceil() as i32 + 1
    }
}

/// Several hands on a uniform background.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub width: usize,
    pub height: usize,
    pub background: [u8; 3],
    pub hands: Vec<HandSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerTruth {
    /// Real-valued far point of the cap, `(row, col)`.
    pub tip: (f64, f64),
    pub d: f64,
    pub d_ref: f64,
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandTruth {
    /// Left-first position among the rendered hands.
    pub ordinal: u8,
    pub cop: Point,
    pub palm_radius: f64,
    pub fingers: Vec<FingerTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FrameTruth {
    /// Sorted by ordinal.
    pub hands: Vec<HandTruth>,
}

impl FrameTruth {
    pub fn finger_count(&self) -> usize {
        self.hands.iter().map(|h| h.fingers.len()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct RenderedFrame {
    pub image: RgbImage,
    pub silhouette: BinarySilhouette,
    pub truth: FrameTruth,
}

/// Draws every hand and reports exact ground truth.
pub fn render(spec: &FrameSpec) -> Result<RenderedFrame, SynthError> {
    let (w, h) = (spec.width, spec.height);
    let scale = ((w * h) as f64 / (crate::BASELINE_WIDTH * crate::BASELINE_HEIGHT) as f64).sqrt();
    let mut masks = Vec::with_capacity(spec.hands.len());
    for (k, hand) in spec.hands.iter().enumerate() {
        hand.validate(scale)?;
        let reach = hand.reach();
        let c = hand.palm_center;
        let mut mask = BinarySilhouette::new(w, h);
        for row in c.row - reach..=c.row + reach {
            for col in c.col - reach..=c.col + reach {
                let p = Point::new(row, col);
                if !hand.covers(p) {
                    continue;
                }
                let inside = row >= 1 && col >= 1 && (row as usize) + 1 < h && (col as usize) + 1 < w;
                if !inside {
                    return Err(SynthError::SpecOverflow { hand: k, width: w, height: h });
                }
                mask.set(p, true);
            }
        }
        masks.push(mask);
    }

    // hands must not touch under 8-connectivity
    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            let touching = masks[i]
                .foreground()
                .any(|p| (-1..=1).any(|dy| (-1..=1).any(|dx| masks[j].is_set(p.translated(dy, dx)))));
            if touching {
                return Err(SynthError::HandsTouch(i, j));
            }
        }
    }

    let mut image = RgbImage::filled(w, h, spec.background).map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let mut silhouette = BinarySilhouette::new(w, h);
    for (hand, mask) in spec.hands.iter().zip(&masks) {
        for p in mask.foreground() {
            image.put(p, hand.skin);
            silhouette.set(p, true);
        }
    }

    let leftmost = |m: &BinarySilhouette| m.foreground().map(|p| (p.col, p.row)).min();
    let mut order: Vec<usize> = (0..spec.hands.len()).collect();
    order.sort_by_key(|&k| leftmost(&masks[k]));
    let hands = order
        .iter()
        .enumerate()
        .map(|(ordinal, &k)| {
            let hand = &spec.hands[k];
            let c = hand.palm_center;
            let fingers = hand
                .fingers
                .iter()
                .map(|f| {
                    let (dr, dc) = f.unit();
                    let d = f.tip_distance();
                    FingerTruth {
                        tip: (f64::from(c.row) + d * dr, f64::from(c.col) + d * dc),
                        d,
                        d_ref: f.straight_length,
                        a1: f.a1,
                        a2: 180.0 - f.a1,
                    }
                })
                .collect();
            HandTruth { ordinal: ordinal as u8, cop: c, palm_radius: hand.palm_radius, fingers }
        })
        .collect();

    Ok(RenderedFrame { image, silhouette, truth: FrameTruth { hands } })
}

/// Layout of the standard two-hand corpus at 240x230.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusParams {
    pub sessions: usize,
    /// Bent frames per session, not counting the reference frame.
    pub frames_per_session: usize,
    pub seed: u64,
    pub palm_radius: f64,
    pub finger_width: f64,
    /// Angle between neighbouring fingers.
    pub finger_spacing: f64,
    pub d_ref_range: (f64, f64),
    /// Palm-centre jitter per session and per frame, pixels.
    pub session_jitter: i32,
    pub frame_jitter: i32,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            sessions: 20,
            frames_per_session: 10,
            seed: 7,
            palm_radius: 25.0,
            finger_width: 10.0,
            finger_spacing: 30.0,
            d_ref_range: (100.0, 110.0),
            session_jitter: 2,
            frame_jitter: 2,
        }
    }
}

/// One open-hand reference frame followed by bent frames of the same hands.
#[derive(Debug, Clone)]
pub struct Session {
    pub reference: RenderedFrame,
    pub frames: Vec<RenderedFrame>,
}

/// Palm centres and mean finger directions of the two standard hands. The left
/// hand sits low and reaches up and right, the right hand mirrors it, which
/// keeps every tip at least one filter window away from the other hand and
/// from the image border.
const TWO_HAND_LAYOUT: [(Point, f64); 2] = [(Point::new(164, 31), 35.0), (Point::new(65, 208), 215.0)];

/// Five fingers fanned around `center_angle`, listed clockwise on screen.
pub fn open_hand(palm_center: Point, center_angle: f64, d_ref: [f64; 5], params: &CorpusParams) -> HandSpec {
    let fingers = (0..5)
        .map(|i| FingerSpec {
            base_angle: center_angle + params.finger_spacing * (2.0 - i as f64),
            width: params.finger_width,
            straight_length: d_ref[i],
            a1: 0.0,
        })
        .collect();
    HandSpec { palm_center, palm_radius: params.palm_radius, fingers, skin: SKIN_RGB }
}

fn frame_of(hands: Vec<HandSpec>) -> FrameSpec {
    FrameSpec { width: crate::BASELINE_WIDTH, height: crate::BASELINE_HEIGHT, background: BACKGROUND_RGB, hands }
}

fn jitter(rng: &mut ChaCha8Rng, p: Point, amount: i32) -> Point {
    if amount == 0 {
        return p;
    }
    p.translated(rng.gen_range(-amount..=amount), rng.gen_range(-amount..=amount))
}

/// Open two-hand reference spec for one session.
fn session_hands(rng: &mut ChaCha8Rng, params: &CorpusParams) -> Vec<HandSpec> {
    TWO_HAND_LAYOUT
        .iter()
        .map(|&(center, angle)| {
            let d_ref = std::array::from_fn(|_| rng.gen_range(params.d_ref_range.0..=params.d_ref_range.1));
            open_hand(jitter(rng, center, params.session_jitter), angle, d_ref, params)
        })
        .collect()
}

/// Renders a session, retrying with fresh randomness when a draw does not fit.
fn render_session(rng: &mut ChaCha8Rng, params: &CorpusParams, hand_count: usize) -> Session {
    loop {
        let mut open = session_hands(rng, params);
        open.truncate(hand_count);
        let Ok(reference) = render(&frame_of(open.clone())) else { continue };
        let mut frames = Vec::with_capacity(params.frames_per_session);
        while frames.len() < params.frames_per_session {
            let mut hands = open.clone();
            for hand in &mut hands {
                hand.palm_center = jitter(rng, hand.palm_center, params.frame_jitter);
                for f in &mut hand.fingers {
                    f.a1 = rng.gen_range(0.0..=90.0);
                }
            }
            if let Ok(frame) = render(&frame_of(hands)) {
                frames.push(frame);
            }
        }
        return Session { reference, frames };
    }
}

/// Deterministic two-hand corpus: `sessions` x (1 reference + `frames_per_session` bent frames).
pub fn two_hand_corpus(params: &CorpusParams) -> Vec<Session> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    (0..params.sessions).map(|_| render_session(&mut rng, params, 2)).collect()
}

/// Same layout with only the left hand present.
pub fn one_hand_corpus(params: &CorpusParams) -> Vec<Session> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    (0..params.sessions).map(|_| render_session(&mut rng, params, 1)).collect()
}
