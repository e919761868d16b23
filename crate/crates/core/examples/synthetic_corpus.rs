//! Renders the standard two-hand corpus and prints the ground truth of one frame.

use fingerangle::synth::{two_hand_corpus, CorpusParams};

fn main() {
    let params = CorpusParams { sessions: 2, frames_per_session: 3, ..Default::default() };
    let corpus = two_hand_corpus(&params);
    println!("{} sessions of {} frames", corpus.len(), params.frames_per_session + 1);
    let frame = &corpus[0].frames[0];
    for hand in &frame.truth.hands {
        println!("hand {} palm centre {:?}", hand.ordinal, hand.cop);
        for f in &hand.fingers {
            println!("  tip ({:6.1}, {:6.1})  d {:5.1}  d_ref {:5.1}  a2 {:5.1}", f.tip.0, f.tip.1, f.d, f.d_ref, f.a2);
        }
    }
}
