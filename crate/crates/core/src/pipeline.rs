//! Per-frame orchestration: segment, label, per-hand fingertips and palm
//! centre, then angles against a stored reference.
//!
//! `Combined` mode segments and labels once and runs both hands concurrently.
//! `Sequential` mode runs the whole single-hand pipeline once per hand,
//! repeating segmentation and labelling. The separability filter always sees
//! the mask of the selected hands, so both modes return identical results.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::angle::{capture_reference, report, AngleError, FingerAngle, HandObservation, ReferenceModel};
use crate::blob::{label_components, select_hands, HandRegion, LabeledRegions};
use crate::config::{ConfigError, PipelineConfig};
use crate::fingertip::{detect_fingertips, CsfEvaluator, Fingertip};
use crate::image::{BBox, BinarySilhouette, Point, RgbImage};
use crate::palm::{find_cop, PalmCenter, PalmError};
use crate::skin::segment_skin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sequential,
    #[default]
    Combined,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sequential => "sequential",
            Mode::Combined => "combined",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" => Ok(Mode::Sequential),
            "combined" => Ok(Mode::Combined),
            other => Err(format!("unknown mode {other:?}, expected sequential or combined")),
        }
    }
}

/// Wall time per stage in microseconds. Per-hand stages are summed over hands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct StageTimings {
    pub segment_us: u64,
    pub label_us: u64,
    pub fingertips_us: u64,
    pub palm_us: u64,
    pub angles_us: u64,
    pub total_us: u64,
}

fn micros(d: Duration) -> u64 {
    d.as_micros().try_into().unwrap_or(u64::MAX)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = f();
    (out, micros(start.elapsed()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandDetection {
    pub region: HandRegion,
    pub fingertips: Vec<Fingertip>,
    pub palm: Result<PalmCenter, PalmError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub width: usize,
    pub height: usize,
    /// In ordinal order.
    pub hands: Vec<HandDetection>,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
}

/// Output of segmentation and hand selection.
struct Selection {
    regions: LabeledRegions,
    hands: Vec<HandRegion>,
    selected: BinarySilhouette,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Detection stages in the configured mode.
    pub fn detect(&self, image: &RgbImage) -> Detection {
        self.detect_with(image, self.config.mode)
    }

    pub fn detect_with(&self, image: &RgbImage, mode: Mode) -> Detection {
        let start = Instant::now();
        let mut timings = StageTimings::default();
        let hands = match mode {
            Mode::Combined => self.combined(image, &mut timings),
            Mode::Sequential => self.sequential(image, &mut timings),
        };
        timings.total_us = micros(start.elapsed());
        Detection { width: image.width(), height: image.height(), hands, timings }
    }

    fn select(&self, image: &RgbImage, timings: &mut StageTimings) -> Selection {
        let (silhouette, t) = timed(|| segment_skin(image, &self.config.skin_bounds()));
        timings.segment_us += t;
        let (selection, t) = timed(|| {
            let regions = label_components(&silhouette);
            let min = self.config.min_hand_pixels_for(image.width(), image.height());
            let hands = select_hands(&regions, min);
            let ids: Vec<u32> = hands.iter().map(|h| h.id).collect();
            let selected = regions.mask_of(&ids);
            Selection { regions, hands, selected }
        });
        timings.label_us += t;
        selection
    }

    /// Fingertips and palm centre of one hand; returns the detection and the
    /// time spent in each of the two stages.
    fn hand_stage(
        &self,
        selection: &Selection,
        csf: &CsfEvaluator<'_>,
        hand: &HandRegion,
    ) -> (HandDetection, u64, u64) {
        let mask = selection.regions.component_mask(hand.id);
        let (fingertips, tips_us) = timed(|| detect_fingertips(csf, &mask, hand, &self.config.tip_params()));
        let (palm, palm_us) = timed(|| {
            let window = self.config.palm_window_for(mask.width(), mask.height());
            find_cop(&mask, hand, window, self.config.palm_fill_min)
        });
        (HandDetection { region: *hand, fingertips, palm }, tips_us, palm_us)
    }

    fn combined(&self, image: &RgbImage, timings: &mut StageTimings) -> Vec<HandDetection> {
        let selection = self.select(image, timings);
        let (csf, setup_us) = timed(|| CsfEvaluator::new(&selection.selected, self.config.tip_params().csf));
        timings.fingertips_us += setup_us;
        let results = match selection.hands.as_slice() {
            [] => Vec::new(),
            [one] => vec![self.hand_stage(&selection, &csf, one)],
            [a, b, ..] => {
                let (ra, rb) =
                    rayon::join(|| self.hand_stage(&selection, &csf, a), || self.hand_stage(&selection, &csf, b));
                vec![ra, rb]
            }
        };
        results
            .into_iter()
            .map(|(det, tips_us, palm_us)| {
                timings.fingertips_us += tips_us;
                timings.palm_us += palm_us;
                det
            })
            .collect()
    }

    fn sequential(&self, image: &RgbImage, timings: &mut StageTimings) -> Vec<HandDetection> {
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            // each hand starts again from the raw frame
            let selection = self.select(image, timings);
            let Some(hand) = selection.hands.get(k).copied() else { break };
            let (csf, setup_us) = timed(|| CsfEvaluator::new(&selection.selected, self.config.tip_params().csf));
            let (det, tips_us, palm_us) = self.hand_stage(&selection, &csf, &hand);
            timings.fingertips_us += setup_us + tips_us;
            timings.palm_us += palm_us;
            out.push(det);
            k += 1;
            if k == selection.hands.len() {
                break;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipRecord {
    pub row: i32,
    pub col: i32,
    /// Finger direction, degrees.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandResult {
    pub ordinal: u8,
    pub pixel_count: usize,
    pub bbox: BBox,
    pub cop: Option<Point>,
    pub palm_error: Option<String>,
    /// In finger order when the COP is known, otherwise in detection order.
    pub tips: Vec<TipRecord>,
    pub reference_ordinal: Option<u8>,
    pub displacement: Option<(i32, i32)>,
    pub angles: Vec<FingerAngle>,
    /// Reference fingers without a visible tip; read as bent to 90°.
    pub absent: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameStatus {
    Ok,
    NoHandsFound,
    NoReference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameResult {
    pub frame_id: u64,
    pub source: Option<String>,
    pub reference: bool,
    pub status: FrameStatus,
    pub hands: Vec<HandResult>,
    pub timings: StageTimings,
}

impl FrameResult {
    /// Same record with timings zeroed, for comparisons across runs and modes.
    pub fn without_timings(&self) -> Self {
        Self { timings: StageTimings::default(), ..self.clone() }
    }

    pub fn angle_count(&self) -> usize {
        self.hands.iter().map(|h| h.angles.len()).sum()
    }
}

/// Hands that have a palm centre, as angle observations.
pub fn observations(frame_id: u64, detection: &Detection) -> Vec<HandObservation> {
    detection
        .hands
        .iter()
        .filter_map(|h| {
            let palm = h.palm.as_ref().ok()?;
            Some(HandObservation::new(frame_id, h.region.ordinal, palm.cop, &h.fingertips))
        })
        .collect()
}

/// Runs frames through the pipeline against a stored reference.
#[derive(Debug, Clone)]
pub struct Tracker {
    pipeline: Pipeline,
    reference: Option<ReferenceModel>,
}

impl Tracker {
    pub fn new(pipeline: Pipeline) -> Self {
        Self { pipeline, reference: None }
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn reference(&self) -> Option<&ReferenceModel> {
        self.reference.as_ref()
    }

    pub fn set_reference_model(&mut self, reference: ReferenceModel) {
        self.reference = Some(reference);
    }

    /// Replaces the reference with the open hands shown in `image`.
    pub fn capture(&mut self, frame_id: u64, image: &RgbImage) -> Result<&ReferenceModel, AngleError> {
        let detection = self.pipeline.detect(image);
        let model = capture_reference(&observations(frame_id, &detection))?;
        Ok(self.reference.insert(model))
    }

    pub fn process(&self, frame_id: u64, image: &RgbImage) -> FrameResult {
        let detection = self.pipeline.detect(image);
        self.assemble(frame_id, &detection)
    }

    /// Builds the frame record for an existing detection.
    pub fn assemble(&self, frame_id: u64, detection: &Detection) -> FrameResult {
        let mut timings = detection.timings;
        let start = Instant::now();
        let obs = observations(frame_id, detection);
        let mut hands: Vec<HandResult> = detection
            .hands
            .iter()
            .map(|h| {
                let ordered = obs.iter().find(|o| o.hand_ordinal == h.region.ordinal).map(|o| &o.fingertips);
                let tips = ordered
                    .unwrap_or(&h.fingertips)
                    .iter()
                    .map(|t| TipRecord { row: t.exact.row, col: t.exact.col, theta: t.theta })
                    .collect();
                HandResult {
                    ordinal: h.region.ordinal,
                    pixel_count: h.region.pixel_count,
                    bbox: h.region.bbox,
                    cop: h.palm.as_ref().ok().map(|p| p.cop),
                    palm_error: h.palm.as_ref().err().map(ToString::to_string),
                    tips,
                    reference_ordinal: None,
                    displacement: None,
                    angles: Vec::new(),
                    absent: Vec::new(),
                }
            })
            .collect();

        let status = if detection.hands.is_empty() {
            FrameStatus::NoHandsFound
        } else {
            match self.reference.as_ref().map(|r| report(frame_id, &obs, r)) {
                None | Some(Err(_)) => FrameStatus::NoReference,
                Some(Ok(rep)) => {
                    for ha in rep.hands {
                        if let Some(h) = hands.iter_mut().find(|h| h.ordinal == ha.hand_ordinal) {
                            h.reference_ordinal = Some(ha.reference_ordinal);
                            h.displacement = Some(ha.displacement);
                            h.angles = ha.angles;
                            h.absent = ha.absent;
                        }
                    }
                    FrameStatus::Ok
                }
            }
        };
        timings.angles_us = micros(start.elapsed());
        timings.total_us += timings.angles_us;
        let is_reference = self.reference.as_ref().is_some_and(|r| r.frame_id == frame_id);
        FrameResult { frame_id, source: None, reference: is_reference, status, hands, timings }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{two_hand_corpus, CorpusParams};

    fn corpus() -> Vec<crate::synth::Session> {
        two_hand_corpus(&CorpusParams { sessions: 1, frames_per_session: 3, ..Default::default() })
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("sequential".parse::<Mode>(), Ok(Mode::Sequential));
        assert!("both".parse::<Mode>().is_err());
        assert_eq!(Mode::Combined.to_string(), "combined");
    }

    #[test]
    fn modes_agree() {
        let pipeline = Pipeline::new(PipelineConfig::default()).unwrap();
        for frame in &corpus()[0].frames {
            let a = pipeline.detect_with(&frame.image, Mode::Combined);
            let b = pipeline.detect_with(&frame.image, Mode::Sequential);
            assert_eq!(a.hands, b.hands);
            assert_eq!(a.hands.len(), 2);
        }
    }

    #[test]
    fn reference_frame_reports_open_hands() {
        let session = &corpus()[0];
        let mut tracker = Tracker::new(Pipeline::new(PipelineConfig::default()).unwrap());
        tracker.capture(0, &session.reference.image).unwrap();
        let result = tracker.process(0, &session.reference.image);
        assert_eq!(result.status, FrameStatus::Ok);
        assert!(result.reference);
        assert_eq!(result.angle_count(), 10);
        assert!(result.hands.iter().flat_map(|h| &h.angles).all(|a| a.a2 == 180.0));
    }

    #[test]
    fn blank_frame_has_no_hands() {
        let tracker = Tracker::new(Pipeline::new(PipelineConfig::default()).unwrap());
        let blank = RgbImage::filled(240, 230, [0, 0, 0]).unwrap();
        assert_eq!(tracker.process(3, &blank).status, FrameStatus::NoHandsFound);
    }

    #[test]
    fn angles_need_a_reference() {
        let tracker = Tracker::new(Pipeline::new(PipelineConfig::default()).unwrap());
        let result = tracker.process(1, &corpus()[0].frames[0].image);
        assert_eq!(result.status, FrameStatus::NoReference);
        assert!(result.hands.iter().all(|h| h.cop.is_some() && h.angles.is_empty()));
    }
}
