//! Captures an open-hand reference and tracks bend angles over a session.
//!
//! Fingers are listed clockwise in both the report and the ground truth.

use fingerangle::config::PipelineConfig;
use fingerangle::pipeline::{Pipeline, Tracker};
use fingerangle::synth::{two_hand_corpus, CorpusParams};

fn main() {
    let session = &two_hand_corpus(&CorpusParams { sessions: 1, frames_per_session: 5, ..Default::default() })[0];
    let mut tracker = Tracker::new(Pipeline::new(PipelineConfig::default()).unwrap());
    let reference = tracker.capture(0, &session.reference.image).unwrap();
    println!("reference holds {} fingers", reference.finger_count());

    for (k, frame) in session.frames.iter().enumerate() {
        let result = tracker.process(k as u64 + 1, &frame.image);
        for (hand, truth) in result.hands.iter().zip(&frame.truth.hands) {
            // one slot per reference finger; absent fingers show as dashes
            let mut got = vec!["  -  ".to_string(); truth.fingers.len()];
            for a in &hand.angles {
                got[a.finger_index] = format!("{:5.1}", a.a2);
            }
            let want: Vec<String> = truth.fingers.iter().map(|f| format!("{:5.1}", f.a2)).collect();
            println!("frame {} hand {}: a2 [{}]  truth [{}]", k + 1, hand.ordinal, got.join(" "), want.join(" "));
        }
    }
}
