//! Fingertip detection on one hand: separability candidates, orientation, trace.

use fingerangle::blob::{label_components, select_hands};
use fingerangle::fingertip::{detect_candidates, detect_fingertips, CsfEvaluator, TipParams};
use fingerangle::image::Point;
use fingerangle::synth::{open_hand, render, CorpusParams, FrameSpec, BACKGROUND_RGB};

fn main() {
    let mut hand = open_hand(Point::new(150, 60), 60.0, [100.0, 104.0, 108.0, 102.0, 96.0], &CorpusParams::default());
    hand.fingers[2].a1 = 45.0;
    let frame = render(&FrameSpec { width: 240, height: 230, background: BACKGROUND_RGB, hands: vec![hand] }).unwrap();

    let regions = label_components(&frame.silhouette);
    let region = select_hands(&regions, 200)[0];
    let mask = regions.component_mask(region.id);
    let params = TipParams::default();
    let csf = CsfEvaluator::new(&mask, params.csf);

    for c in detect_candidates(&csf, &mask, &region, params.score_min, params.group_min) {
        println!("candidate {:?} from {} passing pixels", c.approx, c.group_size);
    }
    let truth = &frame.truth.hands[0].fingers;
    for tip in detect_fingertips(&csf, &mask, &region, &params) {
        let nearest = truth
            .iter()
            .map(|f| (f64::from(tip.exact.row) - f.tip.0).hypot(f64::from(tip.exact.col) - f.tip.1))
            .fold(f64::INFINITY, f64::min);
        println!("tip {:?} theta {:6.1}  {:.2} px from the true tip", tip.exact, tip.theta, nearest);
    }
}
