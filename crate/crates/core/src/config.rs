//! Flat key-value pipeline configuration.
//!
//! The file format is TOML with one top-level key per tunable; missing keys
//! keep their defaults and unknown keys are rejected. `key=value` overrides are
//! applied on top of a loaded file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingertip::{CcfGeometry, CsfGeometry, TipParams};
use crate::pipeline::Mode;
use crate::skin::{SkinBounds, SkinError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("override {0:?} is not of the form key=value")]
    Override(String),
    #[error(transparent)]
    Skin(#[from] SkinError),
    #[error("invalid value for {key}: {reason}")]
    Invalid { key: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub hue_lo: f64,
    pub hue_hi: f64,
    pub sat_lo: f64,
    pub sat_hi: f64,
    pub value_lo: f64,
    pub value_hi: f64,
    /// Smallest hand in pixels; 0 scales the 240x230 default with image area.
    pub min_hand_pixels: usize,
    pub csf_radius: u32,
    pub csf_square: u32,
    pub csf_score_min: f64,
    pub group_min: usize,
    pub ccf_inner_diameter: u32,
    pub ccf_outer_diameter: u32,
    pub ccf_inner_weight: i32,
    pub ccf_mid_weight: i32,
    pub ccf_outer_weight: i32,
    pub trace_step: f64,
    /// COP window side; 0 scales the 240x230 default of 30 with image area.
    pub palm_window: usize,
    pub palm_fill_min: f64,
    pub mode: Mode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let skin = SkinBounds::default();
        let tips = TipParams::default();
        Self {
            hue_lo: skin.hue_lo,
            hue_hi: skin.hue_hi,
            sat_lo: skin.sat_lo,
            sat_hi: skin.sat_hi,
            value_lo: skin.value_lo,
            value_hi: skin.value_hi,
            min_hand_pixels: 0,
            csf_radius: tips.csf.circle_radius,
            csf_square: tips.csf.square_side,
            csf_score_min: tips.score_min,
            group_min: tips.group_min,
            ccf_inner_diameter: tips.ccf.inner_diameter,
            ccf_outer_diameter: tips.ccf.outer_diameter,
            ccf_inner_weight: tips.ccf.inner_weight,
            ccf_mid_weight: tips.ccf.mid_weight,
            ccf_outer_weight: tips.ccf.outer_weight,
            trace_step: tips.step,
            palm_window: 0,
            palm_fill_min: 0.95,
            mode: Mode::Combined,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// Applies `key=value` overrides. Values use TOML syntax; bare words are
    /// taken as strings, so `mode=sequential` works unquoted.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self, ConfigError> {
        let mut table = toml::Table::try_from(self).map_err(|e| ConfigError::Parse(e.to_string()))?;
        for item in overrides {
            let item = item.as_ref();
            let (key, raw) = item.split_once('=').ok_or_else(|| ConfigError::Override(item.to_string()))?;
            let (key, raw) = (key.trim(), raw.trim());
            if key.is_empty() {
                return Err(ConfigError::Override(item.to_string()));
            }
            let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(raw.to_string()));
            table.insert(key.to_string(), value);
        }
        let merged: Self =
            table.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
        merged.validate()?;
        Ok(merged)
    }

    pub fn skin_bounds(&self) -> SkinBounds {
        SkinBounds {
            hue_lo: self.hue_lo,
            hue_hi: self.hue_hi,
            sat_lo: self.sat_lo,
            sat_hi: self.sat_hi,
            value_lo: self.value_lo,
            value_hi: self.value_hi,
        }
    }

    pub fn tip_params(&self) -> TipParams {
        TipParams {
            csf: CsfGeometry { circle_radius: self.csf_radius, square_side: self.csf_square },
            ccf: CcfGeometry {
                inner_diameter: self.ccf_inner_diameter,
                outer_diameter: self.ccf_outer_diameter,
                inner_weight: self.ccf_inner_weight,
                mid_weight: self.ccf_mid_weight,
                outer_weight: self.ccf_outer_weight,
            },
            score_min: self.csf_score_min,
            group_min: self.group_min,
            step: self.trace_step,
        }
    }

    pub fn min_hand_pixels_for(&self, width: usize, height: usize) -> usize {
        match self.min_hand_pixels {
            0 => crate::blob::scaled_min_size(width, height),
            n => n,
        }
    }

    pub fn palm_window_for(&self, width: usize, height: usize) -> usize {
        match self.palm_window {
            0 => crate::palm::scaled_window(width, height),
            n => n,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.skin_bounds().validate()?;
        let tips = self.tip_params();
        let invalid = |key, reason: &str| Err(ConfigError::Invalid { key, reason: reason.to_string() });
        if !tips.csf.is_valid() {
            return invalid("csf_radius", "need 0 < 2 * csf_radius < csf_square");
        }
        if !tips.ccf.is_valid() {
            return invalid("ccf_inner_diameter", "need 0 < ccf_inner_diameter < ccf_outer_diameter");
        }
        if !(-1.0..=1.0).contains(&self.csf_score_min) {
            return invalid("csf_score_min", "must lie in [-1, 1]");
        }
        if !(self.trace_step > 0.0 && self.trace_step.is_finite()) {
            return invalid("trace_step", "must be positive");
        }
        if !(self.palm_fill_min > 0.0 && self.palm_fill_min <= 1.0) {
            return invalid("palm_fill_min", "must lie in (0, 1]");
        }
        Ok(())
    }
}
