//! Properties that span several stages, checked on rendered hands.

use proptest::prelude::*;

use fingerangle::blob::{label_components, select_hands};
use fingerangle::config::PipelineConfig;
use fingerangle::fingertip::{detect_fingertips, trace_step, CsfEvaluator, Fingertip, TipParams};
use fingerangle::image::{BinarySilhouette, Point};
use fingerangle::pipeline::{Pipeline, Tracker};
use fingerangle::skin::{segment_skin, SkinBounds};
use fingerangle::synth::{
    render, two_hand_corpus, CorpusParams, FingerSpec, FrameSpec, HandSpec, BACKGROUND_RGB, SKIN_RGB,
};

const SIDE: usize = 200;

fn fingertips(mask: &BinarySilhouette) -> Vec<Fingertip> {
    let regions = label_components(mask);
    let hands = select_hands(&regions, 1);
    let params = TipParams::default();
    let csf = CsfEvaluator::new(mask, params.csf);
    hands.iter().flat_map(|h| detect_fingertips(&csf, &regions.component_mask(h.id), h, &params)).collect()
}

/// Palm in the middle of a square frame with one straight finger.
fn one_finger(angle: f64) -> BinarySilhouette {
    let finger = FingerSpec { base_angle: angle, width: 10.0, straight_length: 80.0, a1: 0.0 };
    let hand = HandSpec { palm_center: Point::new(100, 100), palm_radius: 25.0, fingers: vec![finger], skin: SKIN_RGB };
    render(&FrameSpec { width: SIDE, height: SIDE, background: BACKGROUND_RGB, hands: vec![hand] }).unwrap().silhouette
}

/// Quarter turn counter-clockwise on screen about the frame centre.
fn rotate(p: Point) -> Point {
    Point::new(SIDE as i32 - 1 - p.col, p.row)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quarter_turn_rotates_theta_and_tip(angle in 0.0f64..360.0) {
        let mask = one_finger(angle);
        let rotated = BinarySilhouette::from_fn(SIDE, SIDE, |p| mask.is_set(Point::new(p.col, SIDE as i32 - 1 - p.row)));
        let (before, after) = (fingertips(&mask), fingertips(&rotated));
        prop_assert_eq!(before.len(), 1);
        prop_assert_eq!(after.len(), 1);
        let (a, b) = (before[0], after[0]);
        prop_assert!(angle_gap(b.theta, a.theta + 90.0) <= 5.0, "theta {} then {}", a.theta, b.theta);
        let expected = rotate(a.exact);
        prop_assert!((expected.row - b.exact.row).abs() <= 2 && (expected.col - b.exact.col).abs() <= 2,
            "tip {:?} rotated to {:?}, found {:?}", a.exact, expected, b.exact);
    }
}

#[test]
fn traced_tips_sit_on_the_edge() {
    let corpus = two_hand_corpus(&CorpusParams { sessions: 3, frames_per_session: 5, ..Default::default() });
    let mut seen = 0;
    for frame in corpus.iter().flat_map(|s| std::iter::once(&s.reference).chain(&s.frames)) {
        let tips = fingertips(&frame.silhouette);
        assert!(tips.len() <= 10);
        for t in tips {
            let (dr, dc) = trace_step(t.theta);
            let next = Point::round_from(t.trace_end.0 + dr, t.trace_end.1 + dc);
            assert!(frame.silhouette.is_set(t.exact));
            assert!(!frame.silhouette.is_set(next), "tip {:?} continues to {next:?}", t.exact);
            seen += 1;
        }
    }
    assert!(seen > 100);
}

#[test]
fn segmentation_reproduces_the_rendered_silhouette() {
    let bounds = SkinBounds::default();
    for session in two_hand_corpus(&CorpusParams { sessions: 2, frames_per_session: 2, ..Default::default() }) {
        for frame in std::iter::once(&session.reference).chain(&session.frames) {
            assert_eq!(segment_skin(&frame.image, &bounds), frame.silhouette);
        }
    }
}

/// With the default fill of 0.95, windows overlapping the finger roots pull
/// the palm centre about 2 px towards the fingers, so this closed loop is
/// checked with fully-skin windows.
#[test]
fn fully_skin_palm_windows_recover_straight_lengths() {
    let config = PipelineConfig { palm_fill_min: 1.0, ..Default::default() };
    for session in two_hand_corpus(&CorpusParams { sessions: 20, frames_per_session: 0, ..Default::default() }) {
        let mut tracker = Tracker::new(Pipeline::new(config.clone()).unwrap());
        let model = tracker.capture(0, &session.reference.image).unwrap().clone();
        assert_eq!(model.hands.len(), 2);
        for (hand, truth) in model.hands.iter().zip(&session.reference.truth.hands) {
            assert_eq!(hand.finger_count(), 5);
            let mut measured = hand.d_ref.clone();
            let mut expected: Vec<f64> = truth.fingers.iter().map(|f| f.d_ref).collect();
            measured.sort_by(f64::total_cmp);
            expected.sort_by(f64::total_cmp);
            for (m, e) in measured.iter().zip(&expected) {
                assert!((m - e).abs() <= 3.0, "d_ref {m} against {e}");
            }
        }
    }
}
