//! Engine configuration: gesture thresholds plus layout and history limits.
//!
//! The file format is UTF-8 `key = value` lines; `#` starts a comment.

use std::path::Path;

use thiserror::Error;

use crate::aggregate::DEFAULT_TARGET_BINS;
use crate::chart::LayoutParams;
use crate::gesture::GestureConfig;
use crate::history::DEFAULT_HISTORY_CAP;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub gesture: GestureConfig,
    pub hit_tolerance_dip: f64,
    pub axis_band_dip: f64,
    pub point_radius_dip: f64,
    pub thumb_range_fraction: f64,
    pub target_bins: usize,
    pub history_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        let layout = LayoutParams::default();
        Self {
            gesture: GestureConfig::default(),
            hit_tolerance_dip: 24.0,
            axis_band_dip: layout.axis_band_dip,
            point_radius_dip: layout.point_radius_dip,
            thumb_range_fraction: 0.4,
            target_bins: DEFAULT_TARGET_BINS,
            history_cap: DEFAULT_HISTORY_CAP,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

impl EngineConfig {
    pub fn layout_params(&self) -> LayoutParams {
        LayoutParams {
            axis_band_dip: self.axis_band_dip,
            point_radius_dip: self.point_radius_dip,
        }
    }

    /// Sets one option by its camelCase key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let g = &mut self.gesture;
        match key {
            "tapMaxMs" => g.tap_max_ms = parse(key, value)?,
            "tapSlopDip" => g.tap_slop_dip = parse(key, value)?,
            "doubleTapGapMs" => g.double_tap_gap_ms = parse(key, value)?,
            "doubleTapRadiusDip" => g.double_tap_radius_dip = parse(key, value)?,
            "swipeMinVelocityDipPerS" => g.swipe_min_velocity_dip_per_s = parse(key, value)?,
            "swipeMaxDurationMs" => g.swipe_max_duration_ms = parse(key, value)?,
            "swipeMinDistanceDip" => g.swipe_min_distance_dip = parse(key, value)?,
            "shakeThresholdMps2" => g.shake_threshold_mps2 = parse(key, value)?,
            "shakeMinSamples" => g.shake_min_samples = parse(key, value)?,
            "shakeWindowMs" => g.shake_window_ms = parse(key, value)?,
            "shakeDebounceMs" => g.shake_debounce_ms = parse(key, value)?,
            "gravityAlpha" => g.gravity_alpha = parse(key, value)?,
            "hitToleranceDip" => self.hit_tolerance_dip = parse(key, value)?,
            "axisBandDip" => self.axis_band_dip = parse(key, value)?,
            "pointRadiusDip" => self.point_radius_dip = parse(key, value)?,
            "thumbRangeFraction" => self.thumb_range_fraction = parse(key, value)?,
            "targetBins" => self.target_bins = parse(key, value)?,
            "historyCap" => self.history_cap = parse(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.gesture.validate().map_err(ConfigError::Invalid)?;
        let checks = [
            ("hitToleranceDip", self.hit_tolerance_dip >= 0.0),
            ("axisBandDip", self.axis_band_dip > 0.0),
            ("pointRadiusDip", self.point_radius_dip > 0.0),
            ("thumbRangeFraction", self.thumb_range_fraction > 0.0 && self.thumb_range_fraction <= 1.0),
            ("targetBins", self.target_bins > 0),
            ("historyCap", self.history_cap > 0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((key, _)) => Err(ConfigError::Invalid(format!("`{key}` is out of range"))),
            None => Ok(()),
        }
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    /// Applies overrides from a JSON object with the same keys.
    pub fn apply_json(&mut self, overrides: &serde_json::Map<String, serde_json::Value>) -> Result<(), ConfigError> {
        for (key, value) in overrides {
            let text = match value {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            self.set(key, &text)?;
        }
        self.validate()
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
