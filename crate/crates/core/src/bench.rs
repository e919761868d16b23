//! Sequential versus combined timing over a frame corpus.

use serde::{Deserialize, Serialize};

use crate::image::RgbImage;
use crate::pipeline::{Mode, Pipeline, StageTimings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeStats {
    pub mode: Mode,
    pub samples: usize,
    pub median_us: f64,
    pub mean_us: f64,
    /// Per-stage medians.
    pub stages: StageTimings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BenchSummary {
    pub frames: usize,
    pub repetitions: usize,
    pub sequential: Option<ModeStats>,
    pub combined: Option<ModeStats>,
    /// Combined median over sequential median.
    pub ratio: Option<f64>,
    /// Whether both modes detected the same hands, tips and palm centres.
    pub identical: bool,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn stats(mode: Mode, samples: &[StageTimings]) -> ModeStats {
    let pick = |f: fn(&StageTimings) -> u64| {
        let mut v: Vec<f64> = samples.iter().map(|s| f(s) as f64).collect();
        median(&mut v)
    };
    let totals: Vec<f64> = samples.iter().map(|s| s.total_us as f64).collect();
    ModeStats {
        mode,
        samples: samples.len(),
        median_us: pick(|s| s.total_us),
        mean_us: totals.iter().sum::<f64>() / totals.len().max(1) as f64,
        stages: StageTimings {
            segment_us: pick(|s| s.segment_us).round() as u64,
            label_us: pick(|s| s.label_us).round() as u64,
            fingertips_us: pick(|s| s.fingertips_us).round() as u64,
            palm_us: pick(|s| s.palm_us).round() as u64,
            angles_us: 0,
            total_us: pick(|s| s.total_us).round() as u64,
        },
    }
}

/// Times the detection stages of every frame `repetitions` times in each mode.
///
/// One untimed pass warms caches first. Modes alternate which runs first on
/// each repetition so drift affects both alike. Zero repetitions or frames
/// give an empty summary.
pub fn bench(pipeline: &Pipeline, frames: &[RgbImage], repetitions: usize) -> BenchSummary {
    if repetitions == 0 || frames.is_empty() {
        return BenchSummary { frames: frames.len(), repetitions, identical: true, ..Default::default() };
    }
    let mut identical = true;
    for f in frames {
        let a = pipeline.detect_with(f, Mode::Sequential);
        let b = pipeline.detect_with(f, Mode::Combined);
        identical &= a.hands == b.hands;
    }

    let (mut seq, mut comb) = (Vec::new(), Vec::new());
    for rep in 0..repetitions {
        for f in frames {
            if rep % 2 == 0 {
                seq.push(pipeline.detect_with(f, Mode::Sequential).timings);
                comb.push(pipeline.detect_with(f, Mode::Combined).timings);
            } else {
                comb.push(pipeline.detect_with(f, Mode::Combined).timings);
                seq.push(pipeline.detect_with(f, Mode::Sequential).timings);
            }
        }
    }
    let (s, c) = (stats(Mode::Sequential, &seq), stats(Mode::Combined, &comb));
    let ratio = (s.median_us > 0.0).then(|| c.median_us / s.median_us);
    BenchSummary { frames: frames.len(), repetitions, sequential: Some(s), combined: Some(c), ratio, identical }
}
