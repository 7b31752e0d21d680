use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default onset of linear degradation as a fraction of the failure time.
pub const DEFAULT_TAU_FRACTION: f64 = 0.6;

/// Piecewise-linear RUL labeling: onset `tau = tau_fraction * t_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RulLabelSpec {
    pub tau_fraction: f64,
    pub failure_time_h: f64,
}

impl RulLabelSpec {
    pub fn new(tau_fraction: f64, failure_time_h: f64) -> Result<Self> {
        if !(tau_fraction > 0.0 && tau_fraction < 1.0) {
            return Err(Error::Input(format!(
                "tau fraction must lie in (0, 1), got {tau_fraction}"
            )));
        }
        if !(failure_time_h.is_finite() && failure_time_h > 0.0) {
            return Err(Error::Input(format!(
                "failure time must be positive, got {failure_time_h}"
            )));
        }
        Ok(RulLabelSpec {
            tau_fraction,
            failure_time_h,
        })
    }

    pub fn tau_h(&self) -> f64 {
        self.tau_fraction * self.failure_time_h
    }

    /// Length of the linear branch, `t_f - tau`.
    pub fn degradation_span_h(&self) -> f64 {
        self.failure_time_h - self.tau_h()
    }
}

/// Normalized remaining life at time `t`: 1 up to the onset, then falling
/// linearly to 0 at the failure time.
pub fn label_rul(t_h: f64, spec: &RulLabelSpec) -> Result<f64> {
    let tf = spec.failure_time_h;
    if !(t_h >= 0.0 && t_h <= tf) {
        return Err(Error::Input(format!(
            "label time {t_h} h outside [0, {tf}] h"
        )));
    }
    let tau = spec.tau_h();
    if t_h <= tau {
        Ok(1.0)
    } else {
        Ok((tf - t_h) / (tf - tau))
    }
}

/// Remaining hours on the linear branch for a normalized life `fraction`.
pub fn rul_to_hours(fraction: f64, spec: &RulLabelSpec) -> f64 {
    fraction * spec.degradation_span_h()
}
