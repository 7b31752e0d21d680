//! From raw current traces to fixed-length model inputs.
//!
//! Each sequence becomes one [`FeatureWindow`]: the current is smoothed with
//! a Savitzky-Golay filter, resampled to [`WINDOW_LEN`] steps and min-max
//! normalized; temperature, optical power and wavelength are scaled over the
//! simulator's datasheet ranges and repeated on every step.

mod correlation;
mod resample;
mod savgol;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{label_rul, RulLabelSpec};
use crate::sim::{
    DegradationMode, RunToFailureSequence, OPTICAL_POWER_RANGE_MW, TEMPERATURE_RANGE_K,
    WAVELENGTH_RANGE_NM,
};

pub use self::correlation::{correlation_matrix, feature_rank, CorrelationMatrix, FeatureTable};
pub use self::resample::{minmax_normalize, resample_to_window};
pub use self::savgol::{sg_coefficients, sg_smooth, SgFilterSpec};

/// Time steps per model input.
pub const WINDOW_LEN: usize = 100;

/// Per-step input channels, in network input order.
pub const INPUT_CHANNELS: [&str; 4] = ["current_norm", "T_norm", "P_norm", "lambda_norm"];

pub const FEATURE_CSV_HEADER: [&str; 8] = [
    "window_id",
    "step",
    "current_norm",
    "T_norm",
    "P_norm",
    "lambda_norm",
    "rul_label",
    "mode_label",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionFeature {
    Temperature,
    OpticalPower,
    Wavelength,
}

impl ConditionFeature {
    pub fn range(self) -> (f64, f64) {
        match self {
            ConditionFeature::Temperature => TEMPERATURE_RANGE_K,
            ConditionFeature::OpticalPower => OPTICAL_POWER_RANGE_MW,
            ConditionFeature::Wavelength => WAVELENGTH_RANGE_NM,
        }
    }
}

/// Fixed-range scaling to `[0, 1]`, clamped outside the range.
pub fn scale_condition(value: f64, feature: ConditionFeature) -> f64 {
    let (lo, hi) = feature.range();
    ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// One preprocessed model input of [`WINDOW_LEN`] steps and four channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWindow {
    pub source_id: u64,
    pub mode: DegradationMode,
    pub current: Vec<f64>,
    pub temperature: f64,
    pub optical_power: f64,
    pub wavelength: f64,
    /// Piecewise RUL targets per step, present for degrading sequences.
    pub step_rul_labels: Option<Vec<f64>>,
    pub rul_spec: Option<RulLabelSpec>,
    /// Time of the last raw sample covered by the window.
    pub end_time_h: f64,
}

impl FeatureWindow {
    pub fn validate(&self) -> Result<()> {
        if self.current.len() != WINDOW_LEN {
            return Err(Error::Shape(format!(
                "window {} has {} steps, expected {WINDOW_LEN}",
                self.source_id,
                self.current.len()
            )));
        }
        let in_unit = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        let conditions = [self.temperature, self.optical_power, self.wavelength];
        if !self.current.iter().chain(&conditions).all(|&v| in_unit(v)) {
            return Err(Error::Input(format!(
                "window {} has channel values outside [0, 1]",
                self.source_id
            )));
        }
        if let Some(labels) = &self.step_rul_labels {
            if labels.len() != WINDOW_LEN || !labels.iter().all(|&v| in_unit(v)) {
                return Err(Error::Input(format!(
                    "window {} has malformed RUL labels",
                    self.source_id
                )));
            }
        }
        Ok(())
    }

    /// Row-major `WINDOW_LEN x 4` network input.
    pub fn inputs(&self) -> Vec<f64> {
        self.current
            .iter()
            .flat_map(|&c| [c, self.temperature, self.optical_power, self.wavelength])
            .collect()
    }
}

/// Smooth, resample and normalize one sequence; attach scaled conditions and,
/// when the sequence has a failure time, per-step RUL labels with onset at
/// `tau_fraction * t_f`.
pub fn build_feature_window(
    seq: &RunToFailureSequence,
    spec: SgFilterSpec,
    tau_fraction: f64,
) -> Result<FeatureWindow> {
    seq.validate()?;
    let smoothed = sg_smooth(&seq.currents_ma, spec)?;
    let resampled = resample_to_window(&smoothed, &seq.times_h, WINDOW_LEN)?;
    let current = minmax_normalize(&resampled);

    let (step_rul_labels, rul_spec) = match seq.failure_time_h {
        Some(tf) => {
            let label_spec = RulLabelSpec::new(tau_fraction, tf)?;
            // The last sample may sit slightly past t_f; it is labeled 0.
            let raw: Vec<f64> = seq
                .times_h
                .iter()
                .map(|&t| label_rul(t.min(tf), &label_spec))
                .collect::<Result<_>>()?;
            let labels = resample_to_window(&raw, &seq.times_h, WINDOW_LEN)?
                .into_iter()
                .map(|v| v.clamp(0.0, 1.0))
                .collect();
            (Some(labels), Some(label_spec))
        }
        None => (None, None),
    };

    let c = &seq.conditions;
    let window = FeatureWindow {
        source_id: seq.id,
        mode: seq.mode_label,
        current,
        temperature: scale_condition(c.temperature_k, ConditionFeature::Temperature),
        optical_power: scale_condition(c.optical_power_mw, ConditionFeature::OpticalPower),
        wavelength: scale_condition(c.wavelength_nm, ConditionFeature::Wavelength),
        step_rul_labels,
        rul_spec,
        end_time_h: *seq.times_h.last().expect("validated non-empty"),
    };
    window.validate()?;
    Ok(window)
}

pub fn build_feature_windows(
    sequences: &[RunToFailureSequence],
    spec: SgFilterSpec,
    tau_fraction: f64,
) -> Result<Vec<FeatureWindow>> {
    sequences
        .iter()
        .map(|s| build_feature_window(s, spec, tau_fraction))
        .collect()
}

/// One row per window step, see [`FEATURE_CSV_HEADER`].
pub fn write_feature_windows<W: Write>(writer: W, windows: &[FeatureWindow]) -> Result<()> {
    let wrap = |e: ::csv::Error| Error::Format(format!("feature csv: {e}"));
    let mut out = ::csv::Writer::from_writer(writer);
    out.write_record(FEATURE_CSV_HEADER).map_err(wrap)?;
    for w in windows {
        for (step, current) in w.current.iter().enumerate() {
            let label = w
                .step_rul_labels
                .as_ref()
                .map(|l| l[step].to_string())
                .unwrap_or_default();
            out.write_record([
                w.source_id.to_string(),
                step.to_string(),
                current.to_string(),
                w.temperature.to_string(),
                w.optical_power.to_string(),
                w.wavelength.to_string(),
                label,
                w.mode.to_string(),
            ])
            .map_err(wrap)?;
        }
    }
    out.flush().map_err(|e| Error::io("<feature csv>", e))?;
    Ok(())
}
