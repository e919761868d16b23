//! Times combined against sequential processing on the two-hand corpus.

use fingerangle::bench::bench;
use fingerangle::config::PipelineConfig;
use fingerangle::image::RgbImage;
use fingerangle::pipeline::Pipeline;
use fingerangle::synth::{two_hand_corpus, CorpusParams};

fn main() {
    let corpus = two_hand_corpus(&CorpusParams { sessions: 5, ..Default::default() });
    let frames: Vec<RgbImage> = corpus.iter().flat_map(|s| s.frames.iter().map(|f| f.image.clone())).collect();
    let summary = bench(&Pipeline::new(PipelineConfig::default()).unwrap(), &frames, 3);
    for stats in [&summary.sequential, &summary.combined].into_iter().flatten() {
        println!("{:>10}: median {:.0} us per frame", stats.mode, stats.median_us);
    }
    println!("ratio {:.3}, identical results: {}", summary.ratio.unwrap(), summary.identical);
}
