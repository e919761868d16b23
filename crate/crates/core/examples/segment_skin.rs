//! Skin segmentation of a rendered hand: the silhouette matches the renderer's mask.

use fingerangle::image::Point;
use fingerangle::skin::{segment_skin, SkinBounds};
use fingerangle::synth::{open_hand, render, CorpusParams, FrameSpec, BACKGROUND_RGB};

fn main() {
    let hand = open_hand(Point::new(150, 60), 60.0, [100.0, 104.0, 108.0, 102.0, 96.0], &CorpusParams::default());
    let frame = render(&FrameSpec { width: 240, height: 230, background: BACKGROUND_RGB, hands: vec![hand] }).unwrap();
    let bounds = SkinBounds::default();
    let mask = segment_skin(&frame.image, &bounds);
    println!("skin pixels: {}", mask.count_ones());
    println!("matches rendered silhouette: {}", mask == frame.silhouette);

    // a hue band that excludes the skin tone finds nothing
    let narrow = SkinBounds { hue_lo: 200.0, hue_hi: 220.0, ..bounds };
    println!("pixels with a blue hue band: {}", segment_skin(&frame.image, &narrow).count_ones());
}
