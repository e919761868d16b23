//! Writes an overlay with palm centres, fingertips and angles to a PNG.
//!
//! Usage: `cargo run --example annotate_frame [out.png]`

use fingerangle::annotate::annotate;
use fingerangle::config::PipelineConfig;
use fingerangle::io::write_image;
use fingerangle::pipeline::{Pipeline, Tracker};
use fingerangle::synth::{two_hand_corpus, CorpusParams};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "annotated.png".into());
    let session = &two_hand_corpus(&CorpusParams { sessions: 1, frames_per_session: 1, ..Default::default() })[0];
    let mut tracker = Tracker::new(Pipeline::new(PipelineConfig::default()).unwrap());
    tracker.capture(0, &session.reference.image).unwrap();
    let frame = &session.frames[0].image;
    let result = tracker.process(1, frame);
    write_image(out.as_ref(), &annotate(frame, &result)).unwrap();
    println!("wrote {out}");
}
