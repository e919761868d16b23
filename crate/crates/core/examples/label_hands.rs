//! Labels the connected regions of a frame and keeps the two largest as hands.

use fingerangle::blob::{label_components, scaled_min_size, select_hands};
use fingerangle::image::Point;
use fingerangle::synth::{two_hand_corpus, CorpusParams};

fn main() {
    let session = &two_hand_corpus(&CorpusParams { sessions: 1, frames_per_session: 0, ..Default::default() })[0];
    let mut mask = session.reference.silhouette.clone();
    // a speck of noise that the size filter removes
    for p in [Point::new(5, 120), Point::new(5, 121), Point::new(6, 120)] {
        mask.set(p, true);
    }
    let regions = label_components(&mask);
    println!("components: {:?}", regions.component_sizes());
    let min = scaled_min_size(mask.width(), mask.height());
    for hand in select_hands(&regions, min) {
        println!(
            "hand {}: {} px, leftmost column {}, bbox {:?}",
            hand.ordinal, hand.pixel_count, hand.leftmost_col, hand.bbox
        );
    }
}
