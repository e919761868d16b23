//! Reference capture, finger association and distance-to-angle conversion.
//!
//! A finger's only observable is the distance `d` from its tip to the palm
//! centre. In the open-hand reference frame that distance is `d_ref`; a fully
//! bent finger (a1 = 90°) is taken to sit at `d_ref / 3`, and the bend is linear
//! in `d` between those two points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingertip::Fingertip;
use crate::image::{direction_deg, normalize_deg, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AngleError {
    #[error("reference distance must be positive and finite, got {d_ref}")]
    InvalidReference { d_ref: f64 },
    #[error("distance must be non-negative and finite, got {d}")]
    InvalidDistance { d: f64 },
    #[error("hand {hand} shows no fingertips and cannot seed a reference")]
    EmptyObservation { hand: u8 },
    #[error("no hands observed in the reference frame")]
    NoHandsObserved,
    #[error("no reference captured for any observed hand")]
    NoReference,
}

/// Which side of `[d_ref / 3, d_ref]` a distance was clamped from, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Clamp {
    #[default]
    None,
    /// `d > d_ref`: the hand is nearer the camera than at reference time.
    AboveReference,
    /// `d < d_ref / 3`: shorter than the fully bent model allows.
    BelowThird,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bend {
    pub a1: f64,
    pub a2: f64,
    pub clamp: Clamp,
}

/// Bend of one finger. `a1 + a2 == 180` exactly.
pub fn bend_angle(d: f64, d_ref: f64) -> Result<Bend, AngleError> {
    if !(d_ref.is_finite() && d_ref > 0.0) {
        return Err(AngleError::InvalidReference { d_ref });
    }
    if !(d.is_finite() && d >= 0.0) {
        return Err(AngleError::InvalidDistance { d });
    }
    let third = d_ref / 3.0;
    let (a1, clamp) = if d >= d_ref {
        (0.0, if d > d_ref { Clamp::AboveReference } else { Clamp::None })
    } else if d <= third {
        (90.0, if d < third { Clamp::BelowThird } else { Clamp::None })
    } else {
        (90.0 - (d - third) / (2.0 * d_ref / 3.0) * 90.0, Clamp::None)
    };
    Ok(Bend { a1, a2: 180.0 - a1, clamp })
}

/// Orders tips by a clockwise sweep around `cop`, starting opposite the mean
/// tip direction.
///
/// For a hand with fingers pointing up the sweep starts straight down and the
/// result is left to right. Unlike a plain column sort it is stable when bent
/// fingers pull their tips towards the palm, since each tip stays on its
/// finger's ray from the palm centre.
pub fn order_fingertips(cop: Point, tips: &[Fingertip]) -> Vec<Fingertip> {
    let dirs: Vec<f64> = tips.iter().map(|t| cop.direction_to(t.exact)).collect();
    let (mut sr, mut sc) = (0.0, 0.0);
    for d in &dirs {
        let rad = d.to_radians();
        // on-screen up is -row
        sr -= rad.sin();
        sc += rad.cos();
    }
    let start = if sr.hypot(sc) < 1e-9 { 270.0 } else { normalize_deg(direction_deg(sr, sc) + 180.0) };

    let mut keyed: Vec<(f64, Fingertip)> =
        tips.iter().zip(&dirs).map(|(t, &d)| (normalize_deg(start - d), *t)).collect();
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then(a.1.exact.col.cmp(&b.1.exact.col)).then(a.1.exact.row.cmp(&b.1.exact.row))
    });
    keyed.into_iter().map(|(_, t)| t).collect()
}

/// One hand as seen in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandObservation {
    pub frame_id: u64,
    pub hand_ordinal: u8,
    pub cop: Point,
    /// In finger order, see [`order_fingertips`].
    pub fingertips: Vec<Fingertip>,
}

impl HandObservation {
    /// Builds an observation, putting `tips` in finger order.
    pub fn new(frame_id: u64, hand_ordinal: u8, cop: Point, tips: &[Fingertip]) -> Self {
        Self { frame_id, hand_ordinal, cop, fingertips: order_fingertips(cop, tips) }
    }

    pub fn distances(&self) -> Vec<f64> {
        self.fingertips.iter().map(|t| t.exact.distance(self.cop)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandReference {
    pub hand_ordinal: u8,
    pub cop: Point,
    /// Tip to palm distance per finger, in finger order; all positive.
    pub d_ref: Vec<f64>,
    /// Direction from the palm centre to each tip, degrees.
    pub directions: Vec<f64>,
}

impl HandReference {
    pub fn finger_count(&self) -> usize {
        self.d_ref.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ReferenceModel {
    pub frame_id: u64,
    /// Sorted by ordinal.
    pub hands: Vec<HandReference>,
}

impl ReferenceModel {
    pub fn hand(&self, ordinal: u8) -> Option<&HandReference> {
        self.hands.iter().find(|h| h.hand_ordinal == ordinal)
    }

    pub fn finger_count(&self) -> usize {
        self.hands.iter().map(HandReference::finger_count).sum()
    }
}

/// Records every finger of every observed hand as fully open.
pub fn capture_reference(obs: &[HandObservation]) -> Result<ReferenceModel, AngleError> {
    if obs.is_empty() {
        return Err(AngleError::NoHandsObserved);
    }
    let mut hands = Vec::with_capacity(obs.len());
    for o in obs {
        let d_ref = o.distances();
        if d_ref.is_empty() {
            return Err(AngleError::EmptyObservation { hand: o.hand_ordinal });
        }
        if let Some(&bad) = d_ref.iter().find(|d| !(**d > 0.0)) {
            return Err(AngleError::InvalidReference { d_ref: bad });
        }
        let directions = o.fingertips.iter().map(|t| o.cop.direction_to(t.exact)).collect();
        hands.push(HandReference { hand_ordinal: o.hand_ordinal, cop: o.cop, d_ref, directions });
    }
    hands.sort_by_key(|h| h.hand_ordinal);
    Ok(ReferenceModel { frame_id: obs[0].frame_id, hands })
}

/// Observed tip `observed` matched to reference finger `finger`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub finger: usize,
    pub observed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Association {
    /// Strictly increasing in both `finger` and `observed`.
    pub matched: Vec<Match>,
    /// Reference fingers with no observed tip.
    pub absent: Vec<usize>,
    /// Observed tips left over when more tips than reference fingers are seen.
    pub unmatched: Vec<usize>,
}

/// Order-preserving assignment of `n` observations to `m` reference fingers
/// that matches `min(n, m)` pairs and minimises the summed `cost(observed, finger)`.
///
/// Among equal-cost assignments, later fingers are left unmatched first.
pub fn associate_by(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Association {
    assign(n, m, &cost)
}

fn assign(n: usize, m: usize, cost: &dyn Fn(usize, usize) -> f64) -> Association {
    if n > m {
        let flipped = assign(m, n, &|f, o| cost(o, f));
        let matched = flipped.matched.iter().map(|x| Match { finger: x.observed, observed: x.finger }).collect();
        return Association { matched, absent: Vec::new(), unmatched: flipped.absent };
    }

    // best[i][j]: least cost placing the first i observations among the first j fingers
    let mut best = vec![vec![f64::INFINITY; m + 1]; n + 1];
    best[0].iter_mut().for_each(|c| *c = 0.0);
    for i in 1..=n {
        for j in i..=m {
            let take = best[i - 1][j - 1] + cost(i - 1, j - 1);
            best[i][j] = take.min(best[i][j - 1]);
        }
    }

    let mut matched = Vec::with_capacity(n);
    let (mut i, mut j) = (n, m);
    while i > 0 {
        // skipping the later finger keeps the earlier ones matched
        if j > i && best[i][j - 1] <= best[i][j] {
            j -= 1;
        } else {
            matched.push(Match { finger: j - 1, observed: i - 1 });
            i -= 1;
            j -= 1;
        }
    }
    matched.reverse();
    let absent = (0..m).filter(|f| !matched.iter().any(|x| x.finger == *f)).collect();
    Association { matched, absent, unmatched: Vec::new() }
}

/// [`associate_by`] with cost `|d - d_ref|`.
pub fn associate(observed: &[f64], reference: &[f64]) -> Association {
    associate_by(observed.len(), reference.len(), |o, f| (observed[o] - reference[f]).abs())
}

/// Absolute difference of two directions, `[0, 180]`.
pub fn angular_gap(a: f64, b: f64) -> f64 {
    let d = normalize_deg(a - b);
    d.min(360.0 - d)
}

/// Associates one observed hand with its reference by the direction of each
/// tip from the palm centre.
///
/// Distance cannot tell fingers apart once they bend, since bending is exactly
/// what changes it; the direction of a tip seen from the palm centre stays with
/// its finger.
pub fn associate_fingers(obs: &HandObservation, reference: &HandReference) -> Association {
    let dirs: Vec<f64> = obs.fingertips.iter().map(|t| obs.cop.direction_to(t.exact)).collect();
    associate_by(dirs.len(), reference.directions.len(), |o, f| angular_gap(dirs[o], reference.directions[f]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerAngle {
    /// Reference finger index, in finger order.
    pub finger_index: usize,
    pub tip: Point,
    pub d: f64,
    pub d_ref: f64,
    pub a1: f64,
    pub a2: f64,
    pub clamp: Clamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandAngles {
    pub hand_ordinal: u8,
    /// Ordinal of the reference hand this hand was compared against.
    pub reference_ordinal: u8,
    pub cop: Point,
    /// COP movement since the reference frame, `(drow, dcol)`.
    pub displacement: (i32, i32),
    pub angles: Vec<FingerAngle>,
    /// Reference fingers not seen; reported as bent to the 90° limit.
    pub absent: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct AngleReport {
    pub frame_id: u64,
    pub hands: Vec<HandAngles>,
}

impl AngleReport {
    pub fn angle_count(&self) -> usize {
        self.hands.iter().map(|h| h.angles.len()).sum()
    }
}

/// Pairs each observed hand with a reference hand.
///
/// With as many hands as the reference, ordinals pair up directly. With fewer,
/// left-first ordinals no longer identify hands, so each observed hand takes
/// the unused reference hand whose palm centre is nearest.
fn pair_hands<'r>(obs: &[HandObservation], reference: &'r ReferenceModel) -> Vec<Option<&'r HandReference>> {
    if obs.len() >= reference.hands.len() {
        return obs.iter().map(|o| reference.hand(o.hand_ordinal)).collect();
    }
    let mut used = vec![false; reference.hands.len()];
    obs.iter()
        .map(|o| {
            let best = reference
                .hands
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .min_by(|a, b| o.cop.distance(a.1.cop).total_cmp(&o.cop.distance(b.1.cop)))?;
            used[best.0] = true;
            Some(best.1)
        })
        .collect()
}

/// Bend angles for every observed hand that has a reference.
pub fn report(frame_id: u64, obs: &[HandObservation], reference: &ReferenceModel) -> Result<AngleReport, AngleError> {
    let mut hands = Vec::with_capacity(obs.len());
    for (o, r) in obs.iter().zip(pair_hands(obs, reference)) {
        let Some(r) = r else { continue };
        let assoc = associate_fingers(o, r);
        let mut angles = Vec::with_capacity(assoc.matched.len());
        for m in &assoc.matched {
            let tip = o.fingertips[m.observed].exact;
            let (d, d_ref) = (tip.distance(o.cop), r.d_ref[m.finger]);
            let bend = bend_angle(d, d_ref)?;
            angles.push(FingerAngle {
                finger_index: m.finger,
                tip,
                d,
                d_ref,
                a1: bend.a1,
                a2: bend.a2,
                clamp: bend.clamp,
            });
        }
        hands.push(HandAngles {
            hand_ordinal: o.hand_ordinal,
            reference_ordinal: r.hand_ordinal,
            cop: o.cop,
            displacement: (o.cop.row - r.cop.row, o.cop.col - r.cop.col),
            angles,
            absent: assoc.absent,
        });
    }
    if hands.is_empty() && !obs.is_empty() {
        return Err(AngleError::NoReference);
    }
    hands.sort_by_key(|h| h.hand_ordinal);
    Ok(AngleReport { frame_id, hands })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tip(row: i32, col: i32) -> Fingertip {
        Fingertip {
            exact: Point::new(row, col),
            trace_end: (f64::from(row), f64::from(col)),
            theta: 90.0,
            hand_ordinal: 0,
        }
    }

    #[test]
    fn formula_endpoints() {
        let b = bend_angle(90.0, 90.0).unwrap();
        assert_eq!((b.a1, b.a2, b.clamp), (0.0, 180.0, Clamp::None));
        let b = bend_angle(30.0, 90.0).unwrap();
        assert_eq!((b.a1, b.a2, b.clamp), (90.0, 90.0, Clamp::None));
        let b = bend_angle(60.0, 90.0).unwrap();
        assert!((b.a1 - 45.0).abs() < 1e-9 && (b.a2 - 135.0).abs() < 1e-9);
    }

    #[test]
    fn clamping_is_flagged() {
        assert_eq!(bend_angle(120.0, 90.0).unwrap().clamp, Clamp::AboveReference);
        assert_eq!(bend_angle(120.0, 90.0).unwrap().a1, 0.0);
        assert_eq!(bend_angle(3.0, 90.0).unwrap().clamp, Clamp::BelowThird);
        assert_eq!(bend_angle(0.0, 90.0).unwrap().a2, 90.0);
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(bend_angle(1.0, 0.0), Err(AngleError::InvalidReference { d_ref: 0.0 }));
        assert!(bend_angle(1.0, f64::NAN).is_err());
        assert_eq!(bend_angle(-1.0, 5.0), Err(AngleError::InvalidDistance { d: -1.0 }));
    }

    #[test]
    fn reference_from_345_triangle() {
        let obs = HandObservation::new(0, 0, Point::new(40, 10), &[tip(10, 50)]);
        let model = capture_reference(&[obs]).unwrap();
        assert_eq!(model.hands[0].d_ref, vec![50.0]);
    }

    #[test]
    fn reference_needs_tips() {
        let obs = HandObservation::new(0, 1, Point::new(40, 10), &[]);
        assert_eq!(capture_reference(&[obs]), Err(AngleError::EmptyObservation { hand: 1 }));
        assert_eq!(capture_reference(&[]), Err(AngleError::NoHandsObserved));
    }

    #[test]
    fn upright_hand_orders_left_to_right() {
        let cop = Point::new(100, 100);
        let tips = [tip(40, 110), tip(60, 60), tip(35, 90), tip(70, 150), tip(45, 130)];
        let cols: Vec<i32> = order_fingertips(cop, &tips).iter().map(|t| t.exact.col).collect();
        assert_eq!(cols, vec![60, 90, 110, 130, 150]);
    }

    #[test]
    fn sideways_hand_orders_clockwise() {
        // fingers pointing right: clockwise on screen runs top to bottom
        let cop = Point::new(100, 100);
        let tips = [tip(130, 160), tip(70, 160), tip(100, 170)];
        let rows: Vec<i32> = order_fingertips(cop, &tips).iter().map(|t| t.exact.row).collect();
        assert_eq!(rows, vec![70, 100, 130]);
    }

    #[test]
    fn equal_counts_match_by_position() {
        let a = associate(&[10.0, 50.0, 20.0], &[11.0, 12.0, 13.0]);
        let pairs: Vec<(usize, usize)> = a.matched.iter().map(|m| (m.finger, m.observed)).collect();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 2)]);
        assert!(a.absent.is_empty());
    }

    #[test]
    fn missing_finger_is_found() {
        let a = associate(&[50.0, 70.0, 80.0, 90.0], &[50.0, 60.0, 70.0, 80.0, 90.0]);
        assert_eq!(a.absent, vec![1]);
        let a = associate(&[], &[50.0, 60.0]);
        assert_eq!(a.absent, vec![0, 1]);
    }

    #[test]
    fn ties_keep_earliest_fingers() {
        let a = associate(&[10.0], &[10.0, 10.0, 10.0]);
        assert_eq!(a.matched[0].finger, 0);
        assert_eq!(a.absent, vec![1, 2]);
    }

    #[test]
    fn extra_observations_are_dropped() {
        let a = associate(&[50.0, 5.0, 60.0], &[50.0, 60.0]);
        assert_eq!(a.unmatched, vec![1]);
        let pairs: Vec<(usize, usize)> = a.matched.iter().map(|m| (m.finger, m.observed)).collect();
        assert_eq!(pairs, vec![(0, 0), (1, 2)]);
    }

    /// Tips on rays at 150, 120, 90, 60, 30 degrees from `cop` at distances `d`.
    fn fan(cop: Point, d: &[Option<f64>]) -> Vec<Fingertip> {
        d.iter()
            .enumerate()
            .filter_map(|(k, d)| {
                let t = (150.0 - 30.0 * k as f64).to_radians();
                d.map(|d| tip(cop.row - (d * t.sin()).round() as i32, cop.col + (d * t.cos()).round() as i32))
            })
            .collect()
    }

    #[test]
    fn bent_fingers_keep_their_identity() {
        let cop = Point::new(120, 120);
        let reference = capture_reference(&[HandObservation::new(0, 0, cop, &fan(cop, &[Some(100.0); 5]))]).unwrap();
        // finger 1 folded away; the distances alone would pair finger 0 with finger 1
        let bent =
            HandObservation::new(1, 0, cop, &fan(cop, &[Some(40.0), None, Some(100.0), Some(70.0), Some(100.0)]));
        let assoc = associate_fingers(&bent, &reference.hands[0]);
        assert_eq!(assoc.absent, vec![1]);
        let fingers: Vec<usize> = assoc.matched.iter().map(|m| m.finger).collect();
        assert_eq!(fingers, vec![0, 2, 3, 4]);
        let by_distance = associate(&bent.distances(), &reference.hands[0].d_ref);
        assert_ne!(by_distance.absent, vec![1]);
    }

    #[test]
    fn angular_gap_wraps() {
        assert_eq!(angular_gap(350.0, 10.0), 20.0);
        assert_eq!(angular_gap(10.0, 190.0), 180.0);
    }

    fn open_hand(frame: u64, ordinal: u8, cop: Point) -> HandObservation {
        let tips: Vec<Fingertip> = (0..5).map(|k| tip(cop.row - 60 + 3 * k, cop.col - 40 + 20 * k)).collect();
        HandObservation::new(frame, ordinal, cop, &tips)
    }

    #[test]
    fn reference_frame_is_a_fixpoint() {
        let obs = vec![open_hand(0, 0, Point::new(100, 60)), open_hand(0, 1, Point::new(100, 180))];
        let model = capture_reference(&obs).unwrap();
        let rep = report(0, &obs, &model).unwrap();
        assert_eq!(rep.angle_count(), 10);
        for h in &rep.hands {
            assert_eq!(h.displacement, (0, 0));
            assert!(h.angles.iter().all(|a| a.a2 == 180.0));
        }
    }

    #[test]
    fn lone_hand_pairs_with_nearest_reference() {
        let model =
            capture_reference(&[open_hand(0, 0, Point::new(100, 60)), open_hand(0, 1, Point::new(100, 180))]).unwrap();
        // the right hand alone is now ordinal 0
        let rep = report(1, &[open_hand(1, 0, Point::new(102, 183))], &model).unwrap();
        assert_eq!(rep.hands.len(), 1);
        assert_eq!(rep.hands[0].reference_ordinal, 1);
        assert_eq!(rep.hands[0].displacement, (2, 3));
    }

    #[test]
    fn no_reference_for_any_hand() {
        let model = ReferenceModel::default();
        assert_eq!(report(1, &[open_hand(1, 0, Point::new(100, 60))], &model), Err(AngleError::NoReference));
        assert_eq!(report(1, &[], &model).unwrap().hands.len(), 0);
    }

    /// Every order-preserving choice of `n` fingers out of `m`, by brute force.
    fn exhaustive(observed: &[f64], reference: &[f64]) -> (f64, Vec<usize>) {
        let (n, m) = (observed.len(), reference.len());
        let mut best = (f64::INFINITY, Vec::new());
        for bits in 0u32..(1 << m) {
            if bits.count_ones() as usize != n {
                continue;
            }
            let chosen: Vec<usize> = (0..m).filter(|j| bits & (1 << j) != 0).collect();
            let cost: f64 = chosen.iter().zip(observed).map(|(&j, d)| (d - reference[j]).abs()).sum();
            // ties: compare from the last chosen finger backwards, smaller first
            let later_first = |v: &Vec<usize>| v.iter().rev().copied().collect::<Vec<_>>();
            if cost < best.0 - 1e-9 || ((cost - best.0).abs() <= 1e-9 && later_first(&chosen) < later_first(&best.1)) {
                best = (cost, chosen);
            }
        }
        best
    }

    proptest! {
        #[test]
        fn a1_plus_a2_is_exactly_180(d in 0.0f64..500.0, d_ref in 0.01f64..300.0) {
            let b = bend_angle(d, d_ref).unwrap();
            prop_assert_eq!(b.a1 + b.a2, 180.0);
            prop_assert!((0.0..=90.0).contains(&b.a1));
        }

        #[test]
        fn scale_invariant(d in 0.0f64..500.0, d_ref in 0.01f64..300.0, lambda in 0.01f64..100.0) {
            let a = bend_angle(d, d_ref).unwrap();
            let b = bend_angle(d * lambda, d_ref * lambda).unwrap();
            prop_assert!((a.a1 - b.a1).abs() < 1e-9);
        }

        #[test]
        fn a2_monotone_in_d(d in 0.0f64..500.0, extra in 0.0f64..50.0, d_ref in 0.01f64..300.0) {
            prop_assert!(bend_angle(d + extra, d_ref).unwrap().a2 >= bend_angle(d, d_ref).unwrap().a2);
        }

        #[test]
        fn association_matches_exhaustive_oracle(
            reference in proptest::collection::vec(10.0f64..120.0, 1..=5),
            observed in proptest::collection::vec(10.0f64..120.0, 0..=5),
        ) {
            let observed = &observed[..observed.len().min(reference.len())];
            let got = associate(observed, &reference);
            let (best_cost, best_set) = exhaustive(observed, &reference);
            let cost: f64 = got.matched.iter().map(|m| (observed[m.observed] - reference[m.finger]).abs()).sum();
            prop_assert!((cost - best_cost).abs() <= 1e-9);
            let fingers: Vec<usize> = got.matched.iter().map(|m| m.finger).collect();
            prop_assert!(fingers.windows(2).all(|w| w[0] < w[1]));
            let observed_idx: Vec<usize> = got.matched.iter().map(|m| m.observed).collect();
            prop_assert_eq!(observed_idx, (0..observed.len()).collect::<Vec<_>>());
            prop_assert_eq!(fingers.len() + got.absent.len(), reference.len());
            prop_assert_eq!(fingers, best_set);
        }
    }
}
